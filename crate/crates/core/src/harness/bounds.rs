use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::methods::IterateTrace;

/// Relative slack granted to every bound comparison.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Floor,
    Ceiling,
}

/// Measured quantity a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Pareto gap at iterate `t`.
    ParetoGap,
    /// `min_{s <= t}` of the Pareto gap.
    MinParetoGap,
    /// `min_{s < t}` of the Pareto gap; undefined at `t = 0`.
    MinParetoGapBefore,
    /// Suboptimality of the scalarization the method runs on.
    FGap,
    /// Gradient norm of that scalarization.
    GradNorm,
    /// `R * max |zeta p_t(zeta)|` on `[0, L]` for the fitted residual `p_t`.
    ResidualWitness,
}

impl Quantity {
    /// Quantities measured in gradient-norm units.
    pub fn is_gradient_scale(self) -> bool {
        !matches!(self, Quantity::FGap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub method: String,
    pub t: usize,
    pub kind: BoundKind,
    pub quantity: Quantity,
    pub value: f64,
    /// Short formula label, e.g. `"mu*R*v_t"`.
    pub tag: String,
}

/// Floors and ceilings attached to a run, keyed by method and iterate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub entries: Vec<BoundEntry>,
}

/// Outcome of comparing one bound with its measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub method: String,
    pub t: usize,
    pub kind: BoundKind,
    pub quantity: Quantity,
    pub tag: String,
    pub bound: f64,
    pub measured: f64,
    /// Positive when the bound holds: `measured/bound - 1` for floors and
    /// `1 - measured/bound` for ceilings.
    pub margin: f64,
    pub pass: bool,
}

/// Per-iterate measurements of every method in a run.
#[derive(Debug, Clone, Default)]
pub struct Measurements {
    traces: BTreeMap<String, IterateTrace>,
    witnesses: BTreeMap<(String, usize), f64>,
}

impl Measurements {
    pub fn add_trace(&mut self, trace: IterateTrace) {
        self.traces.insert(trace.method_tag.clone(), trace);
    }

    pub fn add_witness(&mut self, method: &str, t: usize, value: f64) {
        self.witnesses.insert((method.to_string(), t), value);
    }

    pub fn trace(&self, method: &str) -> Option<&IterateTrace> {
        self.traces.get(method)
    }

    pub fn get(&self, method: &str, t: usize, q: Quantity) -> Option<f64> {
        if q == Quantity::ResidualWitness {
            return self.witnesses.get(&(method.to_string(), t)).copied();
        }
        let tr = self.traces.get(method)?;
        if t >= tr.points.len() {
            return None;
        }
        match q {
            Quantity::ParetoGap => tr.gaps.as_ref().map(|g| g[t]),
            Quantity::MinParetoGap => tr.gaps.as_ref().map(|g| g[..=t].iter().copied().fold(f64::INFINITY, f64::min)),
            Quantity::MinParetoGapBefore => {
                if t == 0 {
                    None
                } else {
                    tr.gaps.as_ref().map(|g| g[..t].iter().copied().fold(f64::INFINITY, f64::min))
                }
            }
            Quantity::FGap => Some(tr.f_gaps[t]),
            Quantity::GradNorm => Some(tr.grad_norms[t]),
            Quantity::ResidualWitness => unreachable!(),
        }
    }
}

fn judge(kind: BoundKind, bound: f64, measured: f64) -> (f64, bool) {
    let margin = match kind {
        BoundKind::Floor if bound != 0.0 => measured / bound - 1.0,
        BoundKind::Ceiling if bound != 0.0 => 1.0 - measured / bound,
        BoundKind::Floor => measured - bound,
        BoundKind::Ceiling => bound - measured,
    };
    let pass = match kind {
        BoundKind::Floor => measured >= bound * (1.0 - BOUND_SLACK),
        BoundKind::Ceiling => measured <= bound * (1.0 + BOUND_SLACK),
    };
    (margin, pass && measured.is_finite())
}

impl BoundCurve {
    pub fn push(&mut self, method: &str, t: usize, kind: BoundKind, quantity: Quantity, value: f64, tag: &str) {
        self.entries.push(BoundEntry {
            method: method.to_string(),
            t,
            kind,
            quantity,
            value,
            tag: tag.to_string(),
        });
    }

    /// Tightest gradient-scale floor or ceiling for `(method, t)`.
    pub fn tightest(&self, method: &str, t: usize, kind: BoundKind) -> Option<f64> {
        let vals = self
            .entries
            .iter()
            .filter(|e| e.method == method && e.t == t && e.kind == kind && e.quantity.is_gradient_scale())
            .map(|e| e.value);
        match kind {
            BoundKind::Floor => vals.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v)))),
            BoundKind::Ceiling => vals.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v)))),
        }
    }

    /// Compare every entry with its measurement. Entries whose quantity was
    /// not measured are skipped.
    pub fn check(&self, measured: &Measurements) -> Vec<BoundCheck> {
        self.entries
            .iter()
            .filter_map(|e| {
                let m = measured.get(&e.method, e.t, e.quantity)?;
                let (margin, pass) = judge(e.kind, e.value, m);
                Some(BoundCheck {
                    method: e.method.clone(),
                    t: e.t,
                    kind: e.kind,
                    quantity: e.quantity,
                    tag: e.tag.clone(),
                    bound: e.value,
                    measured: m,
                    margin,
                    pass,
                })
            })
            .collect()
    }

    /// Pairs `(floor, ceiling)` on the same method, iterate and quantity
    /// where the floor exceeds the ceiling.
    pub fn inconsistencies(&self) -> Vec<(BoundEntry, BoundEntry)> {
        let mut out = Vec::new();
        for f in self.entries.iter().filter(|e| e.kind == BoundKind::Floor) {
            for c in self.entries.iter().filter(|e| e.kind == BoundKind::Ceiling) {
                if f.method == c.method && f.t == c.t && f.quantity == c.quantity && f.value > c.value * (1.0 + BOUND_SLACK) {
                    out.push((f.clone(), c.clone()));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judge_uses_relative_slack() {
        assert!(judge(BoundKind::Floor, 1.0, 1.0 - 1e-12).1);
        assert!(!judge(BoundKind::Floor, 1.0, 0.99).1);
        assert!(judge(BoundKind::Ceiling, 1.0, 1.0 + 1e-12).1);
        assert!(!judge(BoundKind::Ceiling, 1.0, 1.01).1);
        assert!(!judge(BoundKind::Ceiling, 1.0, f64::NAN).1);
    }

    #[test]
    fn tightest_picks_extremes() {
        let mut b = BoundCurve::default();
        b.push("gd", 1, BoundKind::Floor, Quantity::ParetoGap, 0.1, "a");
        b.push("gd", 1, BoundKind::Floor, Quantity::MinParetoGap, 0.2, "b");
        b.push("gd", 1, BoundKind::Floor, Quantity::FGap, 5.0, "c");
        b.push("gd", 1, BoundKind::Ceiling, Quantity::ParetoGap, 3.0, "d");
        b.push("gd", 1, BoundKind::Ceiling, Quantity::ParetoGap, 2.0, "e");
        assert_eq!(b.tightest("gd", 1, BoundKind::Floor), Some(0.2));
        assert_eq!(b.tightest("gd", 1, BoundKind::Ceiling), Some(2.0));
        assert_eq!(b.tightest("gd", 0, BoundKind::Floor), None);
        assert!(b.inconsistencies().is_empty());
        b.push("gd", 1, BoundKind::Floor, Quantity::ParetoGap, 2.5, "f");
        assert_eq!(b.inconsistencies().len(), 1);
    }
}
