use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Query counts per oracle. Also used as the cost of one forward application
/// of a circuit built from those oracles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub u_s: u64,
    pub u_s_dag: u64,
    pub u_d: u64,
    pub u_d_dag: u64,
    pub aux_gates: u64,
}

impl QueryCounts {
    pub const ZERO: QueryCounts = QueryCounts { u_s: 0, u_s_dag: 0, u_d: 0, u_d_dag: 0, aux_gates: 0 };

    pub fn signal(k: u64) -> Self {
        Self { u_s: k, ..Self::ZERO }
    }

    pub fn dictionary(k: u64) -> Self {
        Self { u_d: k, ..Self::ZERO }
    }

    pub fn aux(k: u64) -> Self {
        Self { aux_gates: k, ..Self::ZERO }
    }

    /// Counts of the inverse circuit.
    pub fn adjoint(self) -> Self {
        Self { u_s: self.u_s_dag, u_s_dag: self.u_s, u_d: self.u_d_dag, u_d_dag: self.u_d, aux_gates: self.aux_gates }
    }

    /// Circuit followed by its inverse.
    pub fn round_trip(self) -> Self {
        self + self.adjoint()
    }

    pub fn scaled(self, k: u64) -> Self {
        Self {
            u_s: self.u_s.saturating_mul(k),
            u_s_dag: self.u_s_dag.saturating_mul(k),
            u_d: self.u_d.saturating_mul(k),
            u_d_dag: self.u_d_dag.saturating_mul(k),
            aux_gates: self.aux_gates.saturating_mul(k),
        }
    }

    pub fn max(self, o: Self) -> Self {
        Self {
            u_s: self.u_s.max(o.u_s),
            u_s_dag: self.u_s_dag.max(o.u_s_dag),
            u_d: self.u_d.max(o.u_d),
            u_d_dag: self.u_d_dag.max(o.u_d_dag),
            aux_gates: self.aux_gates.max(o.aux_gates),
        }
    }

    /// Signal-oracle calls, either direction.
    pub fn signal_total(&self) -> u64 {
        self.u_s.saturating_add(self.u_s_dag)
    }

    /// Dictionary-oracle calls, either direction.
    pub fn dictionary_total(&self) -> u64 {
        self.u_d.saturating_add(self.u_d_dag)
    }

    pub fn total(&self) -> u64 {
        self.signal_total().saturating_add(self.dictionary_total()).saturating_add(self.aux_gates)
    }
}

impl Add for QueryCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            u_s: self.u_s.saturating_add(o.u_s),
            u_s_dag: self.u_s_dag.saturating_add(o.u_s_dag),
            u_d: self.u_d.saturating_add(o.u_d),
            u_d_dag: self.u_d_dag.saturating_add(o.u_d_dag),
            aux_gates: self.aux_gates.saturating_add(o.aux_gates),
        }
    }
}

impl AddAssign for QueryCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sum for QueryCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

/// Running query totals plus a snapshot per completed iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryLedger {
    #[serde(flatten)]
    pub totals: QueryCounts,
    pub per_iteration: Vec<QueryCounts>,
    #[serde(skip)]
    mark: QueryCounts,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, counts: QueryCounts) {
        self.totals += counts;
    }

    pub fn charge_times(&mut self, counts: QueryCounts, times: u64) {
        self.totals += counts.scaled(times);
    }

    /// Charges made since the last snapshot.
    pub fn pending(&self) -> QueryCounts {
        QueryCounts {
            u_s: self.totals.u_s - self.mark.u_s,
            u_s_dag: self.totals.u_s_dag - self.mark.u_s_dag,
            u_d: self.totals.u_d - self.mark.u_d,
            u_d_dag: self.totals.u_d_dag - self.mark.u_d_dag,
            aux_gates: self.totals.aux_gates - self.mark.aux_gates,
        }
    }

    /// Closes the current iteration, recording its charges.
    pub fn end_iteration(&mut self) {
        let delta = self.pending();
        self.per_iteration.push(delta);
        self.mark = self.totals;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshots_sum_to_totals() {
        let mut l = QueryLedger::new();
        l.charge(QueryCounts::signal(3));
        l.end_iteration();
        l.charge_times(QueryCounts::dictionary(2), 4);
        l.charge(QueryCounts::aux(1));
        l.end_iteration();
        let sum: QueryCounts = l.per_iteration.iter().copied().sum();
        assert_eq!(sum, l.totals);
        assert_eq!(l.per_iteration[1].u_d, 8);
    }

    #[test]
    fn adjoint_swaps_directions() {
        let c = QueryCounts { u_s: 1, u_s_dag: 2, u_d: 3, u_d_dag: 4, aux_gates: 5 };
        assert_eq!(c.adjoint().adjoint(), c);
        assert_eq!(c.round_trip().u_s, 3);
    }

    #[test]
    fn json_is_flat() {
        let mut l = QueryLedger::new();
        l.charge(QueryCounts::signal(1));
        l.end_iteration();
        let v: serde_json::Value = serde_json::to_value(&l).unwrap();
        assert_eq!(v["u_s"], 1);
        assert_eq!(v["per_iteration"][0]["u_s"], 1);
    }
}
