//! Finite-horizon density combinatorics: integer sets, closures, boundaries,
//! irreducible decompositions, the filled Folner set and the selection of a
//! common Folner plan across a family of sample sets.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Number of trailing checkpoints over which limsup/liminf quantities are
/// reported when the caller does not say otherwise.
pub const DEFAULT_WINDOW: usize = 4;
/// Default tolerance for density comparisons at finite horizon.
pub const DEFAULT_TOLERANCE: f64 = 0.05;
/// Default growth ratio of the checkpoint ladder.
pub const DEFAULT_LADDER_RATIO: f64 = 2.0;

/// Finite sorted set of nonnegative integers with an explicit horizon.
///
/// Densities are always measured against the window `[1, n]`, so an element
/// `0` may be carried (iterate indices start at zero) without affecting any
/// density computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerSet {
    elems: Vec<u32>,
    horizon: u32,
}

impl IntegerSet {
    /// Builds a set from arbitrary elements; sorts, dedups and validates.
    pub fn new(mut elems: Vec<u32>, horizon: u32) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Domain("horizon must be positive".into()));
        }
        elems.sort_unstable();
        elems.dedup();
        if let Some(&max) = elems.last() {
            if max > horizon {
                return Err(Error::Domain(format!(
                    "element {max} exceeds horizon {horizon}"
                )));
            }
        }
        Ok(IntegerSet { elems, horizon })
    }

    pub fn empty(horizon: u32) -> Self {
        IntegerSet {
            elems: Vec::new(),
            horizon,
        }
    }

    /// The integer interval [a, b].
    pub fn interval(a: u32, b: u32, horizon: u32) -> Result<Self> {
        if a > b {
            return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
        }
        IntegerSet::new((a..=b).collect(), horizon)
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    pub fn contains(&self, k: u32) -> bool {
        self.elems.binary_search(&k).is_ok()
    }

    pub fn max(&self) -> Option<u32> {
        self.elems.last().copied()
    }

    /// Number of elements in [1, n].
    pub fn count_upto(&self, n: u32) -> u64 {
        let hi = self.elems.partition_point(|&e| e <= n);
        let lo = self.elems.partition_point(|&e| e < 1);
        (hi - lo) as u64
    }

    /// `d_n` — the frequency of the set in [1, n]. One exact integer count,
    /// one division.
    pub fn density_upto(&self, n: u32) -> Result<f64> {
        if n == 0 || n > self.horizon {
            return Err(Error::Domain(format!(
                "density window {n} outside [1, {}]",
                self.horizon
            )));
        }
        Ok(self.count_upto(n) as f64 / n as f64)
    }

    /// Union of the integer intervals [a, b] with a, b in the set and
    /// b - a <= m. Consecutive elements at gap <= m are chained, so the
    /// result is the gap-m interval filling of the set.
    pub fn closure(&self, m: u32) -> IntegerSet {
        let mut out = Vec::with_capacity(self.elems.len());
        let mut i = 0;
        while i < self.elems.len() {
            let start = self.elems[i];
            let mut end = start;
            while i + 1 < self.elems.len() && self.elems[i + 1] - end <= m {
                i += 1;
                end = self.elems[i];
            }
            out.extend(start..=end);
            i += 1;
        }
        IntegerSet {
            elems: out,
            horizon: self.horizon,
        }
    }

    /// Elements whose predecessor or successor is missing: the endpoints of
    /// the connected components.
    pub fn boundary(&self) -> IntegerSet {
        let mut out = Vec::new();
        for (i, &e) in self.elems.iter().enumerate() {
            let left = i > 0 && self.elems[i - 1] + 1 == e;
            let right = i + 1 < self.elems.len() && self.elems[i + 1] == e + 1;
            if !(left && right) {
                out.push(e);
            }
        }
        IntegerSet {
            elems: out,
            horizon: self.horizon,
        }
    }

    /// Maximal integer intervals contained in the set, as (start, end) pairs.
    pub fn components(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.elems.len() {
            let start = self.elems[i];
            let mut end = start;
            while i + 1 < self.elems.len() && self.elems[i + 1] == end + 1 {
                i += 1;
                end = self.elems[i];
            }
            out.push((start, end));
            i += 1;
        }
        out
    }

    /// `F^- = { n in F : n+1 in F }`.
    pub fn minus(&self) -> IntegerSet {
        let elems = self
            .elems
            .iter()
            .enumerate()
            .filter(|(i, &e)| self.elems.get(i + 1) == Some(&(e + 1)))
            .map(|(_, &e)| e)
            .collect();
        IntegerSet {
            elems,
            horizon: self.horizon,
        }
    }

    pub fn restrict(&self, n: u32) -> IntegerSet {
        let hi = self.elems.partition_point(|&e| e <= n);
        IntegerSet {
            elems: self.elems[..hi].to_vec(),
            horizon: self.horizon,
        }
    }

    pub fn intersect(&self, other: &IntegerSet) -> IntegerSet {
        let elems = self
            .elems
            .iter()
            .copied()
            .filter(|&e| other.contains(e))
            .collect();
        IntegerSet {
            elems,
            horizon: self.horizon.max(other.horizon),
        }
    }

    pub fn difference(&self, other: &IntegerSet) -> IntegerSet {
        let elems = self
            .elems
            .iter()
            .copied()
            .filter(|&e| !other.contains(e))
            .collect();
        IntegerSet {
            elems,
            horizon: self.horizon,
        }
    }

    pub fn is_subset_of(&self, other: &IntegerSet) -> bool {
        self.elems.iter().all(|&e| other.contains(e))
    }
}

/// Half-open integer interval [a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfOpen {
    pub a: u32,
    pub b: u32,
}

impl HalfOpen {
    pub fn len(&self) -> u32 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.b <= self.a
    }
}

/// Sampled density values along a checkpoint ladder, with the max/min over
/// the trailing window standing in for limsup/liminf.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub upper: f64,
    pub lower: f64,
    pub samples: Vec<(u32, f64)>,
}

impl DensityReport {
    pub fn from_samples(samples: Vec<(u32, f64)>, window: usize) -> Self {
        let w = window.max(1).min(samples.len().max(1));
        let tail = &samples[samples.len().saturating_sub(w)..];
        let upper = tail.iter().map(|s| s.1).fold(0.0_f64, f64::max);
        let lower = tail.iter().map(|s| s.1).fold(1.0_f64, f64::min);
        DensityReport {
            upper,
            lower: lower.min(upper),
            samples,
        }
    }
}

/// Writes F^- as the unique disjoint union of intervals [a, b) with both ends
/// in `e` and no interior point of `e`; requires boundary(F) to lie in `e`.
pub fn irreducible_decomposition(f: &IntegerSet, e: &IntegerSet) -> Result<Vec<HalfOpen>> {
    for &p in f.boundary().elements() {
        if !e.contains(p) {
            return Err(Error::Precondition(format!(
                "boundary point {p} of F is not in E"
            )));
        }
    }
    let mut out = Vec::new();
    for (start, end) in f.components() {
        if start == end {
            continue;
        }
        // Component endpoints are boundary points, hence in E; the cut points
        // are exactly the elements of E inside the component.
        let mut prev = start;
        for &p in e.elements() {
            if p <= start {
                continue;
            }
            if p > end {
                break;
            }
            out.push(HalfOpen { a: prev, b: p });
            prev = p;
        }
        if prev < end {
            out.push(HalfOpen { a: prev, b: end });
        }
    }
    Ok(out)
}

/// Result of the filled-Folner construction.
#[derive(Debug, Clone)]
pub struct FolnerFill {
    /// Checkpoint subsequence, snapped to density-maximizing elements of E.
    pub subsequence: Vec<u32>,
    /// The filled set F with boundary contained in E.
    pub set: IntegerSet,
    /// d_n(F) along the subsequence.
    pub density: DensityReport,
    /// d_n(E n F) along the subsequence.
    pub fill_density: DensityReport,
    /// d_n(boundary F) along the subsequence.
    pub boundary_density: DensityReport,
    /// Observed upper density of E along the chosen subsequence.
    pub observed_upper: f64,
}

/// Builds a set F with boundary inside E that carries the density of E while
/// its own boundary thins out: holes of E are filled with windows of growing
/// closure parameter along a geometric checkpoint ladder.
pub fn folner_fill(e: &IntegerSet, m0: u32, checkpoints: usize) -> Result<FolnerFill> {
    folner_fill_with(e, m0, checkpoints, DEFAULT_LADDER_RATIO, DEFAULT_WINDOW)
}

pub fn folner_fill_with(
    e: &IntegerSet,
    m0: u32,
    checkpoints: usize,
    ladder_ratio: f64,
    window: usize,
) -> Result<FolnerFill> {
    if e.is_empty() {
        return Err(Error::Refused("cannot fill an empty set".into()));
    }
    let horizon = e.horizon();
    let base_density = e.density_upto(horizon)?;
    if base_density <= 0.0 {
        return Err(Error::Refused(
            "observed upper density is zero; nothing to fill".into(),
        ));
    }

    // Checkpoint targets: geometric ladder ending at the horizon.
    let mut targets = Vec::new();
    let mut t = (e.elements()[0].max(4) as f64).min(horizon as f64);
    loop {
        targets.push(t.round() as u32);
        if t.round() as u32 >= horizon {
            break;
        }
        t = (t * ladder_ratio).ceil().min(horizon as f64);
    }
    if checkpoints > 1 && targets.len() > checkpoints {
        let skip = targets.len() - checkpoints;
        targets.drain(..skip);
    }

    // Snap each checkpoint to the element of E maximizing d_n(E) in its
    // window: density peaks of a set occur at its own elements.
    let mut subseq: Vec<u32> = Vec::new();
    let mut prev_target = 0u32;
    for &target in &targets {
        let lo = e.elements().partition_point(|&x| x <= prev_target.max(0));
        let hi = e.elements().partition_point(|&x| x <= target);
        let mut best: Option<(f64, u32)> = None;
        for &n in &e.elements()[lo..hi] {
            if n == 0 {
                continue;
            }
            let d = e.count_upto(n) as f64 / n as f64;
            if best.map_or(true, |(bd, _)| d >= bd) {
                best = Some((d, n));
            }
        }
        if let Some((_, n)) = best {
            if subseq.last() != Some(&n) {
                subseq.push(n);
            }
        }
        prev_target = target;
    }
    if subseq.is_empty() {
        return Err(Error::Refused("no usable checkpoints inside E".into()));
    }

    let observed_upper = {
        let w = window.max(1).min(subseq.len());
        subseq[subseq.len() - w..]
            .iter()
            .map(|&n| e.count_upto(n) as f64 / n as f64)
            .fold(0.0_f64, f64::max)
    };
    if (m0 as f64) <= 2.0 / observed_upper {
        return Err(Error::Precondition(format!(
            "closure floor {m0} must exceed 2/observed upper density = {:.3}",
            2.0 / observed_upper
        )));
    }

    // F = union over ladder steps of [n_{j-1}, n_j] intersected with the
    // (m0 + j)-closure of E. All clip points are elements of E, so every
    // component endpoint of F is an element of E.
    let mut elems: Vec<u32> = Vec::new();
    let mut prev = 1u32;
    for (j, &nj) in subseq.iter().enumerate() {
        let m = m0 + j as u32;
        let lo_idx = e.elements().partition_point(|&x| x < prev.saturating_sub(2 * m));
        let hi_idx = e.elements().partition_point(|&x| x <= nj.saturating_add(2 * m));
        let window_e = IntegerSet {
            elems: e.elements()[lo_idx..hi_idx].to_vec(),
            horizon,
        };
        let closed = window_e.closure(m);
        let from = if j == 0 { 1 } else { prev };
        for &k in closed.elements() {
            if k >= from && k <= nj {
                elems.push(k);
            }
        }
        prev = nj;
    }
    elems.sort_unstable();
    elems.dedup();
    let set = IntegerSet { elems, horizon };

    let boundary = set.boundary();
    if !boundary.is_subset_of(e) {
        return Err(Error::Invariant(
            "filled set has a boundary point outside E".into(),
        ));
    }

    let e_in_f = e.intersect(&set);
    let mut d_f = Vec::new();
    let mut d_ef = Vec::new();
    let mut d_b = Vec::new();
    for &n in &subseq {
        d_f.push((n, set.count_upto(n) as f64 / n as f64));
        d_ef.push((n, e_in_f.count_upto(n) as f64 / n as f64));
        d_b.push((n, boundary.count_upto(n) as f64 / n as f64));
    }

    Ok(FolnerFill {
        subsequence: subseq,
        set,
        density: DensityReport::from_samples(d_f, window),
        fill_density: DensityReport::from_samples(d_ef, window),
        boundary_density: DensityReport::from_samples(d_b, window),
        observed_upper,
    })
}

/// One admissible checkpoint of a Folner plan.
#[derive(Debug, Clone)]
pub struct PlanCheckpoint {
    pub n: u32,
    /// The common set F_n shared by all selected samples.
    pub set: IntegerSet,
    /// Indices of the selected samples A_n.
    pub selected: Vec<usize>,
    /// Total weight of A_n.
    pub weight: f64,
    /// Exact-log combinatorial defect: delta_n with
    /// e^{n delta_n} = 2 * sum_{k<=ceil(n a_n)} C(n, k), a_n = d_n(dF_n).
    pub delta: f64,
    pub boundary_density: f64,
    /// inf over selected samples of d_n(E(x) n F_n).
    pub min_fill_density: f64,
}

/// A family-wide selection: per checkpoint, a common filled set and the
/// samples that share it.
#[derive(Debug, Clone)]
pub struct FolnerPlan {
    pub checkpoints: Vec<PlanCheckpoint>,
    pub beta: f64,
    pub tolerance: f64,
    /// Samples whose observed upper density cleared beta.
    pub admitted: Vec<usize>,
}

impl FolnerPlan {
    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    pub fn final_checkpoint(&self) -> Option<&PlanCheckpoint> {
        self.checkpoints.last()
    }
}

/// ln(2 * sum_{k=1..kmax} C(n, k)) evaluated by the exact term recurrence in
/// log space (no Stirling approximation).
pub fn log_binomial_tail(n: u32, kmax: u32) -> f64 {
    let kmax = kmax.min(n).max(1);
    // log C(n, k) built incrementally; accumulate via log-sum-exp.
    let mut log_c = (n as f64).ln(); // C(n,1) = n
    let mut log_sum = log_c;
    for k in 1..kmax {
        log_c += ((n - k) as f64 / (k + 1) as f64).ln();
        let (hi, lo) = if log_sum > log_c {
            (log_sum, log_c)
        } else {
            (log_c, log_sum)
        };
        log_sum = hi + (lo - hi).exp().ln_1p();
    }
    2.0_f64.ln() + log_sum
}

/// Selects, per checkpoint, the heaviest class of samples sharing one filled
/// set, ties broken toward the lexicographically smallest set. Checkpoints
/// where the boundary density fails to decrease or the fill density drops
/// below `beta - tolerance` are not reported.
pub fn borel_cantelli_select(
    family: &[IntegerSet],
    weights: &[f64],
    beta: f64,
    m0: u32,
    checkpoints: usize,
    tolerance: f64,
) -> Result<FolnerPlan> {
    if family.len() != weights.len() {
        return Err(Error::Domain("family/weights length mismatch".into()));
    }
    let total_w: f64 = weights.iter().sum();
    if (total_w - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("weights must sum to 1".into()));
    }

    // Per-sample fill; samples that cannot be filled or miss beta drop out.
    let mut fills: BTreeMap<usize, FolnerFill> = BTreeMap::new();
    for (i, e) in family.iter().enumerate() {
        if let Ok(fill) = folner_fill(e, m0, checkpoints) {
            if fill.observed_upper > beta {
                fills.insert(i, fill);
            }
        }
    }
    if fills.is_empty() {
        return Ok(FolnerPlan {
            checkpoints: Vec::new(),
            beta,
            tolerance,
            admitted: Vec::new(),
        });
    }
    let admitted: Vec<usize> = fills.keys().copied().collect();

    // Candidate checkpoint values: every n that appears in some admitted
    // sample's subsequence.
    let mut ns: Vec<u32> = fills
        .values()
        .flat_map(|f| f.subsequence.iter().copied())
        .collect();
    ns.sort_unstable();
    ns.dedup();

    let mut plan = Vec::new();
    let mut last_boundary_density = f64::INFINITY;
    for &n in &ns {
        // Group samples by the restriction of their filled set to [1, n].
        let mut classes: BTreeMap<Vec<u32>, (f64, Vec<usize>)> = BTreeMap::new();
        for (&i, fill) in &fills {
            if fill.set.max().map_or(true, |m| m < n) && !fill.subsequence.contains(&n) {
                continue;
            }
            let restricted = fill.set.restrict(n);
            if restricted.is_empty() {
                continue;
            }
            let entry = classes
                .entry(restricted.elements().to_vec())
                .or_insert((0.0, Vec::new()));
            entry.0 += weights[i];
            entry.1.push(i);
        }
        // Heaviest class; BTreeMap order makes the lexicographically smallest
        // pattern win ties.
        let mut best: Option<(&Vec<u32>, &(f64, Vec<usize>))> = None;
        for (pattern, entry) in &classes {
            if best.map_or(true, |(_, b)| entry.0 > b.0 + 1e-15) {
                best = Some((pattern, entry));
            }
        }
        let Some((pattern, (weight, members))) = best else {
            continue;
        };
        let f_n = IntegerSet {
            elems: pattern.clone(),
            horizon: n,
        };
        let boundary = f_n.boundary();
        // Invariant: the common boundary lies in every member's sample set.
        for &i in members {
            if !boundary.is_subset_of(&family[i]) {
                return Err(Error::Invariant(format!(
                    "common boundary escapes E(x) for sample {i}"
                )));
            }
        }
        let bd = boundary.count_upto(n) as f64 / n as f64;
        if bd > last_boundary_density + 1e-12 {
            continue;
        }
        let min_fill = members
            .iter()
            .map(|&i| family[i].intersect(&f_n).count_upto(n) as f64 / n as f64)
            .fold(f64::INFINITY, f64::min);
        if min_fill < beta - tolerance {
            continue;
        }
        let alpha = bd;
        let kmax = (n as f64 * alpha).ceil().max(1.0) as u32;
        let delta = log_binomial_tail(n, kmax) / n as f64;
        // Selection keeps at least e^{-n delta} / n^2 of the mass.
        let floor = (-(n as f64) * delta).exp() / (n as f64 * n as f64);
        if *weight < floor {
            return Err(Error::Invariant(format!(
                "selected class weight {weight} under combinatorial floor {floor}"
            )));
        }
        last_boundary_density = bd;
        plan.push(PlanCheckpoint {
            n,
            set: f_n,
            selected: members.clone(),
            weight: *weight,
            delta,
            boundary_density: bd,
            min_fill_density: min_fill,
        });
    }

    Ok(FolnerPlan {
        checkpoints: plan,
        beta,
        tolerance,
        admitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens(horizon: u32) -> IntegerSet {
        IntegerSet::new((1..=horizon / 2).map(|k| 2 * k).collect(), horizon).unwrap()
    }

    /// Union of blocks [4^k, 2*4^k] truncated at the horizon.
    pub fn quadratic_blocks(horizon: u32) -> IntegerSet {
        let mut elems = Vec::new();
        let mut base: u64 = 1;
        while base <= horizon as u64 {
            let hi = (2 * base).min(horizon as u64);
            elems.extend((base as u32)..=(hi as u32));
            base *= 4;
        }
        IntegerSet::new(elems, horizon).unwrap()
    }

    #[test]
    fn density_of_evens() {
        let e = evens(100);
        assert_eq!(e.density_upto(10).unwrap(), 0.5);
    }

    #[test]
    fn density_of_empty_set() {
        let e = IntegerSet::empty(20);
        assert_eq!(e.density_upto(17).unwrap(), 0.0);
    }

    #[test]
    fn density_domain_errors() {
        let e = evens(100);
        assert!(e.density_upto(0).is_err());
        assert!(e.density_upto(101).is_err());
    }

    #[test]
    fn block_example_density_is_exact() {
        // Enumeration oracle: blocks [4^k, 2*4^k] for k = 0..10 hold 4^k + 1
        // integers each and are pairwise disjoint below 2^21.
        let horizon = 1u32 << 21;
        let mut expected: u64 = 0;
        for k in 0..=10u32 {
            expected += 4u64.pow(k) + 1;
        }
        assert_eq!(expected, 1_398_112);
        let e = quadratic_blocks(horizon);
        assert_eq!(e.count_upto(horizon), 1_398_112);
        assert_eq!(
            e.density_upto(horizon).unwrap(),
            1_398_112.0 / 2_097_152.0
        );
    }

    #[test]
    fn closure_fills_short_gaps_only() {
        let e = IntegerSet::new(vec![1, 5], 10).unwrap();
        assert_eq!(e.closure(4).elements(), &[1, 2, 3, 4, 5]);
        assert_eq!(e.closure(3).elements(), &[1, 5]);
    }

    #[test]
    fn closure_is_monotone_and_extensive() {
        let e = IntegerSet::new(vec![2, 4, 9, 10, 30], 40).unwrap();
        for m in 0..12 {
            let cm = e.closure(m);
            let cm2 = e.closure(m + 1);
            assert!(e.is_subset_of(&cm));
            assert!(cm.is_subset_of(&cm2));
            assert!(cm.boundary().is_subset_of(&e));
        }
    }

    #[test]
    fn boundary_examples() {
        let e = IntegerSet::new(vec![1, 2, 3, 7], 10).unwrap();
        assert_eq!(e.boundary().elements(), &[1, 3, 7]);
        let interval = IntegerSet::interval(4, 9, 10).unwrap();
        assert_eq!(interval.boundary().elements(), &[4, 9]);
        let singletons = IntegerSet::new(vec![2, 4, 6, 8], 10).unwrap();
        assert_eq!(singletons.boundary().elements(), &[2, 4, 6, 8]);
    }

    #[test]
    fn irreducible_decomposition_examples() {
        let f = IntegerSet::new(vec![1, 2, 3, 4], 10).unwrap();
        let e = IntegerSet::new(vec![1, 3, 4, 8], 10).unwrap();
        let dec = irreducible_decomposition(&f, &e).unwrap();
        assert_eq!(dec, vec![HalfOpen { a: 1, b: 3 }, HalfOpen { a: 3, b: 4 }]);

        // Interval inside the full set: unit steps.
        let f = IntegerSet::interval(3, 6, 10).unwrap();
        let all = IntegerSet::interval(1, 10, 10).unwrap();
        let dec = irreducible_decomposition(&f, &all).unwrap();
        assert_eq!(
            dec,
            vec![
                HalfOpen { a: 3, b: 4 },
                HalfOpen { a: 4, b: 5 },
                HalfOpen { a: 5, b: 6 }
            ]
        );

        let empty = IntegerSet::empty(10);
        assert!(irreducible_decomposition(&empty, &e).unwrap().is_empty());
    }

    #[test]
    fn irreducible_decomposition_rejects_bad_boundary() {
        let f = IntegerSet::new(vec![1, 2, 3], 10).unwrap();
        let e = IntegerSet::new(vec![1, 8], 10).unwrap();
        let err = irreducible_decomposition(&f, &e).unwrap_err();
        assert!(err.to_string().contains('3'));
    }

    #[test]
    fn decomposition_union_is_f_minus() {
        // Randomised consistency: union of the intervals equals F^-.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let horizon = 60;
            let mut e_elems: Vec<u32> = (1..=horizon).filter(|_| rng.gen_bool(0.4)).collect();
            if e_elems.is_empty() {
                e_elems.push(1);
            }
            let e = IntegerSet::new(e_elems, horizon).unwrap();
            // F = a union of closures-by-2 clipped to E-boundaries.
            let f = e.closure(3);
            let dec = irreducible_decomposition(&f, &e).unwrap();
            let mut union: Vec<u32> = dec.iter().flat_map(|iv| iv.a..iv.b).collect();
            union.sort_unstable();
            assert_eq!(union, f.minus().elements());
            // Each interval meets E exactly at its left end.
            for iv in &dec {
                assert!(e.contains(iv.a) && e.contains(iv.b));
                assert!((iv.a..iv.b).filter(|&k| e.contains(k)).count() == 1);
            }
        }
    }

    #[test]
    fn folner_fill_on_full_interval() {
        let e = IntegerSet::interval(1, 1 << 12, 1 << 12).unwrap();
        let fill = folner_fill(&e, 8, 8).unwrap();
        assert_eq!(fill.set.len() as u32, 1 << 12);
        assert!((fill.density.upper - 1.0).abs() < 1e-12);
        assert_eq!(fill.set.boundary().elements(), &[1, 1 << 12]);
    }

    #[test]
    fn folner_fill_on_quadratic_blocks() {
        let e = quadratic_blocks(1 << 21);
        let fill = folner_fill(&e, 16, 12).unwrap();
        assert!(fill.set.boundary().is_subset_of(&e));
        assert!(fill.density.upper >= 0.66, "d(F) = {}", fill.density.upper);
        let final_bd = fill.boundary_density.samples.last().unwrap().1;
        assert!(final_bd <= 0.02, "boundary density {final_bd}");
        // Density of E inside F at the last checkpoint is close to d(E).
        assert!(fill.fill_density.upper >= fill.observed_upper - 0.01);
    }

    #[test]
    fn folner_fill_refuses_empty() {
        assert!(folner_fill(&IntegerSet::empty(100), 8, 4).is_err());
    }

    #[test]
    fn fill_leftover_density_decreases_in_closure_parameter() {
        let e = quadratic_blocks(1 << 16);
        let fill = folner_fill(&e, 8, 10).unwrap();
        let n = *fill.subsequence.last().unwrap();
        let mut last = f64::INFINITY;
        for m in [8u32, 16, 32, 64] {
            let left = fill.set.difference(&e.closure(m));
            let d = left.count_upto(n) as f64 / n as f64;
            assert!(d <= last + 1e-12);
            last = d;
        }
    }

    #[test]
    fn borel_cantelli_trivial_family() {
        let n = 1 << 10;
        let full = IntegerSet::interval(1, n, n).unwrap();
        let family = vec![full.clone(), full.clone(), full];
        let w = vec![1.0 / 3.0; 3];
        let plan = borel_cantelli_select(&family, &w, 0.5, 8, 8, 0.05).unwrap();
        assert!(!plan.is_empty());
        let last = plan.final_checkpoint().unwrap();
        assert_eq!(last.selected, vec![0, 1, 2]);
        assert!((last.weight - 1.0).abs() < 1e-12);
        assert!(last.min_fill_density >= 0.95);
    }

    #[test]
    fn borel_cantelli_majority_class_wins() {
        // Two periodic patterns; the 3-heavy class must be selected.
        let n = 1 << 12;
        let a: Vec<u32> = (1..=n).filter(|k| k % 3 != 0).collect(); // density 2/3
        let b: Vec<u32> = (1..=n).filter(|k| k % 2 == 0).collect(); // density 1/2
        let ea = IntegerSet::new(a, n).unwrap();
        let eb = IntegerSet::new(b, n).unwrap();
        let family = vec![ea.clone(), ea.clone(), ea, eb];
        let w = vec![0.25; 4];
        let plan = borel_cantelli_select(&family, &w, 0.4, 8, 8, 0.05).unwrap();
        assert!(!plan.is_empty());
        let mut majority = 0;
        for cp in &plan.checkpoints {
            if cp.selected == vec![0, 1, 2] {
                majority += 1;
            }
            for &i in &cp.selected {
                assert!(cp.set.boundary().is_subset_of(&family[i]));
            }
            let floor = (-(cp.n as f64) * cp.delta).exp() / (cp.n as f64).powi(2);
            assert!(cp.weight >= floor);
        }
        // The heavy class wins wherever it participates; only a checkpoint
        // past the end of its own subsequence may fall to the minority.
        assert!(majority as f64 >= 0.8 * plan.checkpoints.len() as f64);
    }

    #[test]
    fn borel_cantelli_empty_when_no_sample_clears_beta() {
        let n = 1 << 10;
        let sparse = IntegerSet::new((1..=8).map(|k| k * 100).collect(), n).unwrap();
        let plan =
            borel_cantelli_select(&[sparse], &[1.0], 0.5, 8, 8, 0.05).unwrap();
        assert!(plan.is_empty());
        assert!(plan.admitted.is_empty());
    }

    #[test]
    fn log_binomial_tail_matches_direct_sum() {
        // 2 * (C(20,1) + ... + C(20,4)) = 2 * (20 + 190 + 1140 + 4845)
        let exact: f64 = 2.0 * (20.0 + 190.0 + 1140.0 + 4845.0);
        assert!((log_binomial_tail(20, 4) - exact.ln()).abs() < 1e-9);
    }
}
