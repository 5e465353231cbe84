use std::fmt::Write;

use super::model::ForwardModel;

/// Accumulates `coef var` terms and wraps long rows.
struct Row {
    text: String,
    line_len: usize,
    empty: bool,
}

impl Row {
    fn new(label: &str) -> Self {
        let text = format!(" {label}:");
        Row {
            line_len: text.len(),
            text,
            empty: true,
        }
    }

    fn term(&mut self, coef: i64, var: &str) -> &mut Self {
        if coef == 0 {
            return self;
        }
        let sign = if coef < 0 {
            "-"
        } else if self.empty {
            ""
        } else {
            "+"
        };
        let mag = coef.unsigned_abs();
        let piece = match (mag, sign.is_empty()) {
            (1, true) => format!(" {var}"),
            (1, false) => format!(" {sign} {var}"),
            (_, true) => format!(" {mag} {var}"),
            (_, false) => format!(" {sign} {mag} {var}"),
        };
        if self.line_len + piece.len() > 78 {
            self.text.push_str("\n   ");
            self.line_len = 3;
        }
        self.line_len += piece.len();
        self.text.push_str(&piece);
        self.empty = false;
        self
    }

    fn finish(mut self, rel: &str, rhs: i64) -> String {
        if self.empty {
            self.text.push_str(" 0");
        }
        let _ = write!(self.text, " {rel} {rhs}");
        self.text
    }
}

/// Writes the winner-determination model as a CPLEX-style LP file.
///
/// Objective coefficients are in cents. Variables: `y_c` (bid accepted),
/// `x_c_d` (customer `c` stays night `d`, only inside the bid window),
/// `l_c` (arrival night) and `n_r_d` (rooms of type `r` in use on night `d`,
/// bounded by the auctioned count and coupled to real-room capacity).
pub fn export_lp(model: &ForwardModel) -> String {
    let days = model.days();
    let horizon = days as i64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ forward auction winner determination, {} objective, money in cents",
        model.objective_mode()
    );
    let _ = writeln!(
        out,
        "\\ {} bids, {} room types, {} real groups, {} nights",
        model.bids().len(),
        model.room_types().len(),
        model.groups().len(),
        days
    );

    out.push_str("Maximize\n");
    let mut obj = Row::new("obj");
    for mb in model.bids() {
        obj.term(mb.coefficient.cents(), &format!("y_{}", mb.customer_id()));
    }
    out.push_str(&obj.text);
    if obj.empty {
        out.push_str(" 0");
    }
    out.push('\n');

    out.push_str("Subject To\n");
    // Nightly demand of each room type stays within n_r_d.
    for (rt_pos, rt) in model.room_types().iter().enumerate() {
        for d in 1..=days {
            let mut row = Row::new(&format!("cap_{}_{d}", rt.id));
            for mb in model.bids() {
                let in_window = (mb.bid.window_lo..=mb.bid.window_hi).contains(&d);
                if let Some(&(_, rooms)) = mb.demand.iter().find(|(r, _)| *r == rt_pos) {
                    if in_window {
                        row.term(rooms as i64, &format!("x_{}_{d}", mb.customer_id()));
                    }
                }
            }
            row.term(-1, &format!("n_{}_{d}", rt.id));
            let _ = writeln!(out, "{}", row.finish("<=", 0));
        }
    }
    // Real-room coupling of virtual types.
    for g in model.groups() {
        for d in 1..=days {
            let mut row = Row::new(&format!("grp_{}_{d}", g.id));
            for rt in &g.member_room_types {
                row.term(1, &format!("n_{rt}_{d}"));
            }
            let _ = writeln!(out, "{}", row.finish("<=", g.capacity as i64));
        }
    }
    for mb in model.bids() {
        let c = mb.customer_id();
        let b = &mb.bid;
        let mut row = Row::new(&format!("stay_{c}"));
        for d in b.window_lo..=b.window_hi {
            row.term(1, &format!("x_{c}_{d}"));
        }
        row.term(-(b.nights as i64), &format!("y_{c}"));
        let _ = writeln!(out, "{}", row.finish("=", 0));
        for d in b.window_lo..=b.window_hi {
            // x = 1 implies l <= d.
            let mut lo = Row::new(&format!("lo_{c}_{d}"));
            lo.term(1, &format!("l_{c}")).term(horizon, &format!("x_{c}_{d}"));
            let _ = writeln!(out, "{}", lo.finish("<=", d as i64 + horizon));
            // x = 1 implies d <= l + M - 1.
            let mut hi = Row::new(&format!("hi_{c}_{d}"));
            hi.term(d as i64, &format!("x_{c}_{d}")).term(-1, &format!("l_{c}"));
            let _ = writeln!(out, "{}", hi.finish("<=", b.nights as i64 - 1));
        }
    }

    out.push_str("Bounds\n");
    for mb in model.bids() {
        let b = &mb.bid;
        let latest = (b.window_hi + 1).saturating_sub(b.nights).max(b.window_lo);
        let _ = writeln!(out, " {} <= l_{} <= {latest}", b.window_lo, mb.customer_id());
        for d in &b.blackout_days {
            let _ = writeln!(out, " x_{}_{d} = 0", mb.customer_id());
        }
    }
    for rt in model.room_types() {
        for d in 1..=days {
            let _ = writeln!(out, " 0 <= n_{}_{d} <= {}", rt.id, rt.auctioned_count);
        }
    }

    let mut binaries = Vec::new();
    let mut generals = Vec::new();
    for mb in model.bids() {
        let c = mb.customer_id();
        binaries.push(format!("y_{c}"));
        binaries.extend((mb.bid.window_lo..=mb.bid.window_hi).map(|d| format!("x_{c}_{d}")));
        generals.push(format!("l_{c}"));
    }
    for rt in model.room_types() {
        generals.extend((1..=days).map(|d| format!("n_{}_{d}", rt.id)));
    }
    for (header, vars) in [("Binaries", binaries), ("Generals", generals)] {
        if vars.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{header}");
        for chunk in vars.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}
