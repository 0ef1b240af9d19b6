use std::collections::HashSet;
use std::fmt;

use super::UcInstance;

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    /// Entity the issue is attached to, e.g. `generator g1` or `renewable r0 step 3`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ValidationIssue {
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "  {issue}")?;
        }
        Ok(())
    }
}

fn finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

/// Collects every violated invariant of the instance, in a fixed order.
pub fn validate_instance(inst: &UcInstance) -> ValidationReport {
    let mut r = ValidationReport::default();
    let t = inst.horizon;
    if t == 0 {
        r.push("instance", "horizon must be at least 1");
    }
    if inst.nodes.is_empty() {
        r.push("instance", "at least one node is required");
    }

    let mut seen = HashSet::new();
    for n in &inst.nodes {
        let loc = format!("node {}", n.id);
        if !seen.insert(n.id.as_str()) {
            r.push(&loc, "duplicate node id");
        }
        if n.demand.len() != t {
            r.push(
                &loc,
                format!("demand has {} steps, horizon is {t}", n.demand.len()),
            );
        }
        for (s, &d) in n.demand.iter().enumerate() {
            if !(d.is_finite() && d >= 0.0) {
                r.push(
                    format!("{loc} step {s}"),
                    format!("demand {d} must be finite and >= 0"),
                );
            }
        }
    }

    let node_ok = |id: &str| inst.node_index(id).is_some();

    for g in &inst.generators {
        let loc = format!("generator {}", g.id);
        if !node_ok(&g.node) {
            r.push(&loc, format!("references unknown node `{}`", g.node));
        }
        let nums = [
            g.p_min,
            g.p_max,
            g.a,
            g.b,
            g.c,
            g.start_cost,
            g.ramp_up,
            g.ramp_down,
            g.startup_limit,
            g.shutdown_limit,
        ];
        if !finite(&nums) {
            r.push(&loc, "all numeric parameters must be finite");
            continue;
        }
        if !(0.0 <= g.p_min && g.p_min <= g.p_max) {
            r.push(
                &loc,
                format!("need 0 <= p_min ({}) <= p_max ({})", g.p_min, g.p_max),
            );
        }
        if g.c < 0.0 {
            r.push(&loc, format!("quadratic cost c = {} must be >= 0", g.c));
        }
        for (name, v) in [
            ("ramp_up", g.ramp_up),
            ("ramp_down", g.ramp_down),
            ("startup_limit", g.startup_limit),
            ("shutdown_limit", g.shutdown_limit),
        ] {
            if v < 0.0 {
                r.push(&loc, format!("{name} = {v} must be >= 0"));
            }
        }
        if g.startup_limit < g.p_min {
            r.push(
                &loc,
                format!("startup_limit ({}) < p_min ({})", g.startup_limit, g.p_min),
            );
        }
        if g.shutdown_limit < g.p_min {
            r.push(
                &loc,
                format!(
                    "shutdown_limit ({}) < p_min ({})",
                    g.shutdown_limit, g.p_min
                ),
            );
        }
        if g.min_uptime < 1 || g.min_downtime < 1 {
            r.push(&loc, "min_uptime and min_downtime must be >= 1");
        }
        match g.initial_status {
            Some(0) => r.push(&loc, "initial_status must be nonzero"),
            Some(k) if k > 0 => {
                let p0 = g.initial_power.unwrap_or(0.0);
                if !(p0.is_finite() && g.p_min <= p0 && p0 <= g.p_max) {
                    r.push(
                        &loc,
                        format!("initial_power {p0} outside [p_min, p_max] for an online unit"),
                    );
                }
            }
            _ => {
                if g.initial_power.is_some_and(|p| p != 0.0) {
                    r.push(&loc, "initial_power must be 0 for an offline unit");
                }
            }
        }
    }

    for res in &inst.renewables {
        let loc = format!("renewable {}", res.id);
        if !node_ok(&res.node) {
            r.push(&loc, format!("references unknown node `{}`", res.node));
        }
        if !(res.p_max.is_finite() && res.p_max >= 0.0) {
            r.push(&loc, format!("p_max {} must be finite and >= 0", res.p_max));
        }
        if res.availability.len() != t {
            r.push(
                &loc,
                format!(
                    "availability has {} steps, horizon is {t}",
                    res.availability.len()
                ),
            );
        }
        for (s, &af) in res.availability.iter().enumerate() {
            if !(0.0..=1.0).contains(&af) {
                r.push(
                    format!("{loc} step {s}"),
                    format!("availability {af} outside [0, 1]"),
                );
            }
        }
    }

    for s in &inst.storage {
        let loc = format!("storage {}", s.id);
        if !node_ok(&s.node) {
            r.push(&loc, format!("references unknown node `{}`", s.node));
        }
        let nums = [
            s.charge_limit,
            s.discharge_limit,
            s.energy_min,
            s.energy_max,
            s.charge_eff,
            s.discharge_eff,
            s.initial_energy(),
        ];
        if !finite(&nums) {
            r.push(&loc, "all numeric parameters must be finite");
            continue;
        }
        if s.charge_limit < 0.0 || s.discharge_limit < 0.0 {
            r.push(&loc, "charge and discharge limits must be >= 0");
        }
        let e0 = s.initial_energy();
        if !(0.0 <= s.energy_min && s.energy_min <= e0 && e0 <= s.energy_max) {
            r.push(
                &loc,
                format!(
                    "need 0 <= energy_min ({}) <= initial_energy ({e0}) <= energy_max ({})",
                    s.energy_min, s.energy_max
                ),
            );
        }
        for (name, eff) in [
            ("charge_eff", s.charge_eff),
            ("discharge_eff", s.discharge_eff),
        ] {
            if !(eff > 0.0 && eff <= 1.0) {
                r.push(&loc, format!("{name} = {eff} outside (0, 1]"));
            }
        }
    }

    for l in &inst.lines {
        let loc = format!("line {}", l.id);
        for end in [&l.from, &l.to] {
            if !node_ok(end) {
                r.push(&loc, format!("references unknown node `{end}`"));
            }
        }
        if l.from == l.to {
            r.push(&loc, "from and to must differ");
        }
        if !(l.f_min <= 0.0 && 0.0 <= l.f_max) {
            r.push(
                &loc,
                format!("need f_min ({}) <= 0 <= f_max ({})", l.f_min, l.f_max),
            );
        }
    }
    r
}
