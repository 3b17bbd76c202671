//! Frame potentials `F^(k) = avg |Tr(u†v)|^{2k}` over ensemble pairs.

use crate::error::EnsembleError;
use crate::operator::Operator;
use crate::parallel::{stream_rng, Execution};
use crate::stats::{compensated_sum, CompensatedSum};

use super::design::{design_unitary_at, DesignScheme, RefocusSchedule};

/// Which pairs enter the average.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PairEstimator {
    /// `|E|⁻² Σ_{u,v}` including `u = v`. Biased upward by `d^{2k}/|E|`.
    AllPairs,
    /// `(|E|(|E|−1))⁻¹ Σ_{u≠v}`, unbiased for i.i.d. members.
    #[default]
    DistinctPairs,
}

/// First and second frame potentials of one ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FramePotentials {
    pub f1: f64,
    pub f2: f64,
}

impl FramePotentials {
    pub fn order(&self, k: u32) -> f64 {
        if k == 1 {
            self.f1
        } else {
            self.f2
        }
    }
}

/// Both frame potentials. Rows of the pair matrix are evaluated as
/// independent work items and reduced in row order, so the result does not
/// depend on the execution strategy.
pub fn frame_potentials(
    members: &[Operator],
    estimator: PairEstimator,
    exec: Execution,
) -> Result<FramePotentials, EnsembleError> {
    let n = members.len();
    if n == 0 {
        return Err(EnsembleError::Empty);
    }
    if estimator == PairEstimator::DistinctPairs && n < 2 {
        return Err(EnsembleError::TooFewMembers(n));
    }
    let dim = members[0].dim();
    if let Some(m) = members.iter().find(|m| m.dim() != dim) {
        return Err(EnsembleError::MixedDimensions(dim, m.dim()));
    }
    // row a holds pairs (a, b) with b > a; symmetric, so count twice
    let rows = exec.map_indexed(n, |a| {
        let (mut s1, mut s2) = (CompensatedSum::default(), CompensatedSum::default());
        for b in a + 1..n {
            let t = members[a].inner(&members[b]).norm_sqr();
            s1.add(t);
            s2.add(t * t);
        }
        let own = members[a].inner(&members[a]).norm_sqr();
        (s1.value(), s2.value(), own)
    });
    let off1 = 2.0 * compensated_sum(rows.iter().map(|r| r.0));
    let off2 = 2.0 * compensated_sum(rows.iter().map(|r| r.1));
    let nf = n as f64;
    Ok(match estimator {
        PairEstimator::DistinctPairs => {
            let pairs = nf * (nf - 1.0);
            FramePotentials {
                f1: off1 / pairs,
                f2: off2 / pairs,
            }
        }
        PairEstimator::AllPairs => {
            let self1 = compensated_sum(rows.iter().map(|r| r.2));
            let self2 = compensated_sum(rows.iter().map(|r| r.2 * r.2));
            FramePotentials {
                f1: (off1 + self1) / (nf * nf),
                f2: (off2 + self2) / (nf * nf),
            }
        }
    })
}

/// Single-order convenience wrapper; `k` must be 1 or 2.
pub fn frame_potential(
    members: &[Operator],
    k: u32,
    estimator: PairEstimator,
    exec: Execution,
) -> Result<f64, EnsembleError> {
    if !(1..=2).contains(&k) {
        return Err(EnsembleError::UnsupportedOrder(k));
    }
    Ok(frame_potentials(members, estimator, exec)?.order(k))
}

/// One point of a frame-potential time trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub t_ms: f64,
    pub potentials: FramePotentials,
}

/// Frame potentials of design trajectories truncated at each of `times_ms`.
///
/// Trajectories continue past `n_segments` with further alternating
/// segments when a requested time lies beyond one round. Sample `i` draws its
/// schedule from stream `i` of `seed`, row by row, so its first
/// `n_segments` rows coincide with the unitary that
/// [`super::UnitaryEnsemble::generate`] would produce for the same index.
pub fn frame_potential_trace(
    scheme: &DesignScheme,
    times_ms: &[f64],
    n_samples: usize,
    seed: u64,
    estimator: PairEstimator,
    exec: Execution,
) -> Result<Vec<TracePoint>, EnsembleError> {
    scheme.validate()?;
    if times_ms.windows(2).any(|w| w[0] > w[1]) || times_ms.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(EnsembleError::UnsortedTimes);
    }
    let t_max = times_ms.last().copied().unwrap_or(0.0);
    let segment_ms = 0.5 * scheme.period_ms;
    let needed = if segment_ms > 0.0 {
        (t_max / segment_ms).ceil() as usize
    } else {
        0
    };
    let n_rows = needed.max(scheme.n_segments);
    let trajectories: Vec<Vec<Operator>> = exec.map_indexed(n_samples, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let schedule = RefocusSchedule::draw(n_rows, scheme.n_spins(), &mut rng);
        times_ms
            .iter()
            .map(|&t| design_unitary_at(scheme, &schedule, t))
            .collect()
    });
    times_ms
        .iter()
        .enumerate()
        .map(|(ti, &t_ms)| {
            let members: Vec<Operator> = trajectories.iter().map(|traj| traj[ti].clone()).collect();
            Ok(TracePoint {
                t_ms,
                potentials: frame_potentials(&members, estimator, exec)?,
            })
        })
        .collect()
}
