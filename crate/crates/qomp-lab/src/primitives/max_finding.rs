use super::{require, EstimateOutcome, Noise, NoiseMode, PrimitiveError, QueryCounts, QueryLedger};

/// Index selected by approximate max-finding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxOutcome {
    /// Position in the candidate set.
    pub index: usize,
    /// Estimated value at that position.
    pub value: f64,
    /// Oracle queries charged.
    pub queries: u64,
    /// Whether the simulated search failed and returned a random index.
    pub failed: bool,
}

/// Oracle queries charged for a search over `len` items: `ceil(sqrt(len) ln(len / delta))`.
pub fn max_finding_queries(len: usize, delta: f64) -> u64 {
    let l = len as f64;
    (l.sqrt() * (l / delta).ln()).ceil().max(1.0) as u64
}

/// Approximate max-finding over `0..len` with an oracle that estimates each
/// value to within `eps`.
///
/// On success the returned position `j` satisfies `u_j >= max_k u_k - 2 eps`.
/// In stochastic mode the search fails with probability `delta`, returning a
/// uniformly random position. `access` is the cost of one query to the
/// candidate set itself.
pub fn find_max_approx<F>(
    len: usize,
    delta: f64,
    access: QueryCounts,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
    mut oracle: F,
) -> Result<MaxOutcome, PrimitiveError>
where
    F: FnMut(usize, &mut Noise, &mut QueryLedger) -> Result<EstimateOutcome, PrimitiveError>,
{
    require(len > 0, String::new).map_err(|_| PrimitiveError::EmptySet)?;
    let mut per_query = QueryCounts::ZERO;
    let mut values = Vec::with_capacity(len);
    for j in 0..len {
        let mut scratch = QueryLedger::new();
        values.push(oracle(j, noise, &mut scratch)?.value);
        per_query = per_query.max(scratch.totals);
    }
    find_max_over_estimates(&values, per_query, delta, access, noise, ledger)
}

/// Same as [`find_max_approx`] with the oracle outputs already computed and
/// the cost of one oracle query given as `per_query`.
pub fn find_max_over_estimates(
    values: &[f64],
    per_query: QueryCounts,
    delta: f64,
    access: QueryCounts,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<MaxOutcome, PrimitiveError> {
    if values.is_empty() {
        return Err(PrimitiveError::EmptySet);
    }
    require(delta > 0.0 && delta < 1.0, || format!("failure probability {delta} outside (0, 1)"))?;
    let mut best = 0;
    for (j, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = j;
        }
    }
    let mut failed = false;
    if noise.mode() == NoiseMode::Stochastic && noise.bernoulli(delta) {
        best = noise.index(values.len());
        failed = true;
    }
    let queries = max_finding_queries(values.len(), delta);
    ledger.charge_times(per_query + access, queries);
    Ok(MaxOutcome { index: best, value: values[best], queries, failed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::NoiseModel;

    #[test]
    fn ties_go_to_smallest_index() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let out = find_max_over_estimates(
            &[1.0, 3.0, 3.0],
            QueryCounts::ZERO,
            0.1,
            QueryCounts::ZERO,
            &mut noise,
            &mut ledger,
        )
        .unwrap();
        assert_eq!(out.index, 1);
    }

    #[test]
    fn empty_set_is_an_error() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let r = find_max_approx(0, 0.1, QueryCounts::ZERO, &mut noise, &mut ledger, |_, _, _| {
            Ok(EstimateOutcome::exact(0.0))
        });
        assert_eq!(r, Err(PrimitiveError::EmptySet));
    }

    #[test]
    fn charges_follow_the_query_formula() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let out = find_max_approx(16, 0.5, QueryCounts::aux(1), &mut noise, &mut ledger, |j, _, l| {
            l.charge(QueryCounts::signal(2));
            Ok(EstimateOutcome::exact(j as f64))
        })
        .unwrap();
        assert_eq!(out.index, 15);
        let q = (4.0 * 32f64.ln()).ceil() as u64;
        assert_eq!(out.queries, q);
        assert_eq!(ledger.totals.u_s, 2 * q);
        assert_eq!(ledger.totals.aux_gates, q);
    }
}
