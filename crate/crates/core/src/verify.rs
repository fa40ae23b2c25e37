//! Invariant suites with one JSON-friendly record per check.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chord::{chords_from_tour, ChordDiagram};
use crate::graph::{hierholzer_tour, suppress_degree_one, DirectedMultigraph, Tour, TransitionSystem};
use crate::lab::{
    covering_coupling, deletion_identity_error, exact_kernel, flat_lsi_sample, number_domination_min_eig,
    overlapping_pfaffian_max, random_test_function, row_isotropy, spectral_gap, ExcitationBasis, LabError,
    SkewMatrix, SubsetWeightTable,
};
use crate::oracle::{best_count, enumerate_tours};
use crate::rng::{WalkRng, STREAM_AUX, STREAM_WALK};
use crate::store::{CandidateOrder, ChordStore};
use crate::switchnet::{
    audit_pointwise, build_network, exact_lift_counts, exact_lift_counts_reverse, expand_graph, ExpandParams,
};
use crate::walk::{step_naive, PositionWalk, RepairWalk};

pub const SUITES: [&str; 5] = ["skewdet", "chords", "chain", "switchnet", "oracle"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// Measured quantity; see `bound` for the direction.
    pub value: f64,
    pub bound: f64,
    pub instances: usize,
}

impl Check {
    fn at_most(suite: &str, name: &str, value: f64, bound: f64, instances: usize) -> Self {
        Check { suite: suite.into(), name: name.into(), passed: value <= bound, value, bound, instances }
    }

    fn at_least(suite: &str, name: &str, value: f64, bound: f64, instances: usize) -> Self {
        Check { suite: suite.into(), name: name.into(), passed: value >= bound, value, bound, instances }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkewdetParams {
    pub gap_n_max: usize,
    pub n_max: usize,
    pub seeds: usize,
    pub lsi_trials: usize,
    pub covering_matrices: usize,
    pub seed: u64,
}

impl Default for SkewdetParams {
    fn default() -> Self {
        SkewdetParams { gap_n_max: 10, n_max: 8, seeds: 20, lsi_trials: 1000, covering_matrices: 50, seed: 0 }
    }
}

/// Spectral gap, exterior-algebra identities, flat LSI and covering couplings.
pub fn skewdet_suite(p: &SkewdetParams) -> Result<Vec<Check>, LabError> {
    let mut out = gap_checks(p)?;
    out.extend(identity_checks(p)?);
    out.extend(covering_checks(p)?);
    Ok(out)
}

pub fn gap_checks(p: &SkewdetParams) -> Result<Vec<Check>, LabError> {
    const S: &str = "skewdet";
    let mut rng = WalkRng::new(p.seed, STREAM_AUX);
    let (mut worst, mut count) = (f64::INFINITY, 0);
    let (mut block_err, mut blocks) = (0.0f64, 0);
    for n in 2..=p.gap_n_max {
        for _ in 0..p.seeds {
            let t = SubsetWeightTable::new(&SkewMatrix::random(n, &mut rng))?;
            let gap = spectral_gap(&exact_kernel(&t)?);
            worst = worst.min(gap - 2.0 / n as f64);
            count += 1;
        }
        let params: Vec<f64> = (0..n / 2).map(|_| rng.uniform(0.2, 2.0)).collect();
        let t = SubsetWeightTable::new(&SkewMatrix::block_diagonal(n, &params))?;
        block_err = block_err.max((spectral_gap(&exact_kernel(&t)?) - 2.0 / n as f64).abs());
        blocks += 1;
    }
    Ok(vec![
        Check::at_least(S, "gap_minus_two_over_n", worst, -1e-9, count),
        Check::at_most(S, "block_diagonal_gap_error", block_err, 1e-9, blocks),
    ])
}

pub fn identity_checks(p: &SkewdetParams) -> Result<Vec<Check>, LabError> {
    const S: &str = "skewdet";
    let mut rng = WalkRng::new(p.seed, STREAM_AUX);
    let (mut gram, mut dom, mut wedge, mut star, mut overlap, mut deletion) =
        (0.0f64, f64::INFINITY, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut lsi_fail, mut lsi_worst, mut not_flat) = (0usize, f64::NEG_INFINITY, 0usize);
    let mut count = 0;
    for n in 2..=p.n_max {
        for _ in 0..p.seeds {
            let a = SkewMatrix::random(n, &mut rng);
            let t = SubsetWeightTable::new(&a)?;
            let basis = ExcitationBasis::new(&t);
            gram = gram.max(basis.gram_error());
            dom = dom.min(number_domination_min_eig(&t, &basis));
            let iso = row_isotropy(&t, &basis);
            wedge = wedge.max(iso.wedge);
            star = star.max(iso.star_weight);
            overlap = overlap.max(overlapping_pfaffian_max(&t));
            let h: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            deletion = deletion.max(deletion_identity_error(&a, &h)?);

            let diagram = ChordDiagram::random(n, &mut rng);
            let flat = SubsetWeightTable::new(&SkewMatrix::from_int(&diagram.signed_interlacement(None))?)?;
            if !flat.is_flat(1e-12) {
                not_flat += 1;
            }
            let k = exact_kernel(&flat)?;
            for trial in 0..p.lsi_trials {
                let f = random_test_function(k.states.len(), trial, &mut rng);
                let s = flat_lsi_sample(&k, &f);
                lsi_worst = lsi_worst.max(s.entropy - s.bound);
                if !s.holds() {
                    lsi_fail += 1;
                }
            }
            count += 1;
        }
    }
    Ok(vec![
        Check::at_most(S, "excitation_gram_error", gram, 1e-9, count),
        Check::at_least(S, "number_domination_min_eig", dom, -1e-9, count),
        Check::at_most(S, "row_isotropy_wedge", wedge, 1e-8, count),
        Check::at_most(S, "row_isotropy_star_weight", star, 1e-8, count),
        Check::at_most(S, "overlapping_pfaffian_sum", overlap, 1e-8, count),
        Check::at_most(S, "deletion_identity", deletion, 1e-8, count),
        Check::at_most(S, "interlacement_not_flat", not_flat as f64, 0.0, count),
        Check::at_most(S, "flat_lsi_violations", lsi_fail as f64, 0.0, count * p.lsi_trials),
        Check::at_most(S, "flat_lsi_worst_excess", lsi_worst, 1e-9, count * p.lsi_trials),
    ])
}

pub fn covering_checks(p: &SkewdetParams) -> Result<Vec<Check>, LabError> {
    const S: &str = "skewdet";
    let mut rng = WalkRng::new(p.seed ^ 0x5eed, STREAM_AUX);
    let (mut flow, mut marg, mut far, mut coords) = (0.0f64, 0.0f64, 0usize, 0usize);
    for m in 0..p.covering_matrices {
        let n = 2 + m % (p.n_max - 1);
        let a = SkewMatrix::random(n, &mut rng);
        for i in 0..n {
            let c = match covering_coupling(&a, i) {
                Ok(c) => c,
                // one-sided conditional: coordinate is not feasible
                Err(LabError::InvariantViolation(_)) => continue,
                Err(e) => return Err(e),
            };
            flow = flow.max((c.flow - 1.0).abs());
            marg = marg.max(c.source_marginal_error).max(c.sink_marginal_error);
            far += c.pairs.iter().filter(|&&(s0, s1, _)| (s0 ^ s1).count_ones() != 2).count();
            coords += 1;
        }
    }
    Ok(vec![
        Check::at_most(S, "covering_flow_error", flow, 1e-9, coords),
        Check::at_most(S, "covering_marginal_error", marg, 1e-9, coords),
        Check::at_most(S, "covering_pairs_not_at_distance_two", far as f64, 0.0, coords),
    ])
}

/// Vertices whose pairing differs from the reference system (2-in/2-out graphs).
pub fn flip_mask(g: &DirectedMultigraph, reference: &TransitionSystem, t: &Tour) -> u32 {
    let ts = t.transition_system();
    (0..g.vertex_count())
        .filter(|&v| {
            let e = g.in_arcs(v)[0];
            ts.next(e) != reference.next(e)
        })
        .fold(0, |m, v| m | 1 << v)
}

/// Exact kernel of the walk on the tours of `g`, with states as flip masks
/// against the Hierholzer tour (ascending).
pub fn walk_kernel(g: &DirectedMultigraph) -> Result<(Vec<u32>, DMatrix<f64>), String> {
    let t0 = hierholzer_tour(g).map_err(|e| e.to_string())?;
    let reference = t0.transition_system();
    let census = enumerate_tours(g).map_err(|e| e.to_string())?;
    let mut states: Vec<(u32, &Tour)> = census.tours.iter().map(|t| (flip_mask(g, &reference, t), t)).collect();
    states.sort_by_key(|s| s.0);
    let index: HashMap<u32, usize> = states.iter().enumerate().map(|(i, s)| (s.0, i)).collect();
    let n = g.vertex_count();
    let k = states.len();
    let mut p = DMatrix::zeros(k, k);
    for (i, &(_, t)) in states.iter().enumerate() {
        let base = PositionWalk::new(g, t).map_err(|e| e.to_string())?;
        for x in 0..n {
            let w = base.clone().crossing_count(x);
            for c in 0..=w {
                let mut walk = base.clone();
                walk.step_with_index(x, c);
                let j = index[&flip_mask(g, &reference, &walk.tour())];
                p[(i, j)] += 1.0 / (n * (w + 1)) as f64;
            }
        }
    }
    Ok((states.into_iter().map(|s| s.0).collect(), p))
}

/// Walk kernel against the skew-determinantal kernel of the interlacement matrix.
pub fn chain_suite(graphs: usize, max_arcs: usize, seed: u64) -> Vec<Check> {
    const S: &str = "chain";
    let mut rng = WalkRng::new(seed, STREAM_AUX);
    let (mut diff, mut stat, mut mu_err, mut mismatched, mut failures) = (0.0f64, 0.0f64, 0.0f64, 0usize, 0usize);
    let n_max = (max_arcs / 2).max(2);
    for _ in 0..graphs {
        let n = 2 + rng.below(n_max - 1);
        let g = crate::gen::regular2(n, &mut rng).expect("regular2 generation");
        let (states, p) = match walk_kernel(&g) {
            Ok(x) => x,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let t0 = hierholzer_tour(&g).unwrap();
        let a = chords_from_tour(&g, &t0).unwrap().signed_interlacement(None);
        let exact = SkewMatrix::from_int(&a).and_then(|a| SubsetWeightTable::new(&a)).and_then(|t| exact_kernel(&t));
        let Ok(k) = exact else {
            failures += 1;
            continue;
        };
        if k.states != states {
            mismatched += 1;
            continue;
        }
        diff = diff.max((&p - &k.p).abs().max());
        let size = states.len() as f64;
        for j in 0..states.len() {
            let col: f64 = p.column(j).sum() / size;
            stat = stat.max((col - 1.0 / size).abs());
            mu_err = mu_err.max((k.mu[j] - 1.0 / size).abs());
        }
    }
    vec![
        Check::at_most(S, "kernel_failures", failures as f64, 0.0, graphs),
        Check::at_most(S, "state_space_mismatches", mismatched as f64, 0.0, graphs),
        Check::at_most(S, "kernel_max_abs_diff", diff, 1e-12, graphs),
        Check::at_most(S, "uniform_stationarity_error", stat, 1e-9, graphs),
        Check::at_most(S, "measure_uniformity_error", mu_err, 1e-9, graphs),
    ]
}

/// Shared-randomness run of the chunk store against the position walk.
pub fn chords_suite(m: usize, steps: u64, validate_every: u64, seed: u64) -> Vec<Check> {
    const S: &str = "chords";
    let mut rng = WalkRng::new(seed, STREAM_AUX);
    let g = crate::gen::regular2((m / 2).max(2), &mut rng).expect("regular2 generation");
    let t = hierholzer_tour(&g).unwrap();
    let mut store = ChordStore::build(&g, &t, None).expect("store build");
    store.set_candidate_order(CandidateOrder::ById);
    let mut naive = PositionWalk::new(&g, &t).unwrap();
    let mut r1 = WalkRng::new(seed, STREAM_WALK);
    let mut r2 = r1.clone();
    let (mut diverged, mut invalid, mut validations) = (0usize, 0usize, 0usize);
    let mut first_divergence = f64::NAN;
    for step in 1..=steps {
        let a = store.step(&mut r1);
        let b = step_naive(&mut naive, &mut r2);
        if a != b {
            diverged += 1;
            first_divergence = step as f64;
            break;
        }
        if validate_every > 0 && step % validate_every == 0 {
            validations += 1;
            if store.validate().is_err() || store.tour() != naive.tour() {
                invalid += 1;
            }
        }
    }
    let mut out = vec![
        Check::at_most(S, "trajectory_divergences", diverged as f64, 0.0, steps as usize),
        Check::at_most(S, "validator_failures", invalid as f64, 0.0, validations),
        Check::at_most(S, "final_tour_differs", (store.tour() != naive.tour()) as u8 as f64, 0.0, 1),
    ];
    if diverged > 0 {
        out.push(Check::at_most(S, "first_divergent_step", first_divergence, 0.0, 1));
    }
    out
}

/// Enumeration against the arborescence formula.
pub fn oracle_suite(graphs: usize, max_arcs: usize, seed: u64) -> Vec<Check> {
    const S: &str = "oracle";
    let mut rng = WalkRng::new(seed, STREAM_AUX);
    let mut mismatches = 0;
    let mut checked = 0;
    while checked < graphs {
        let n = 2 + rng.below(3);
        let g = crate::gen::random_eulerian(n, 1 + rng.below(3), &mut rng).expect("generation");
        if g.arc_count() > max_arcs {
            continue;
        }
        if !counts_agree(&g) {
            mismatches += 1;
        }
        checked += 1;
    }
    let tri = crate::gen::bidirected_triangle();
    let tri_count = enumerate_tours(&tri).map(|c| c.count()).unwrap_or(0);
    let tri_best = best_count(&tri).map(|b| b == 3u32.into()).unwrap_or(false);
    vec![
        Check::at_most(S, "enumeration_vs_best_mismatches", mismatches as f64, 0.0, graphs),
        Check::at_most(S, "triangle_enumeration_minus_3", (tri_count as f64 - 3.0).abs(), 0.0, 1),
        Check::at_most(S, "triangle_best_not_3", (!tri_best) as u8 as f64, 0.0, 1),
    ]
}

fn counts_agree(g: &DirectedMultigraph) -> bool {
    match (enumerate_tours(g), best_count(g)) {
        (Ok(c), Ok(b)) => b == c.count().into(),
        _ => false,
    }
}

/// Audit rate of small networks, exact lift-count identity and cycle
/// preservation under contraction.
pub fn switchnet_suite(nets: usize, settings: usize, seed: u64) -> Vec<Check> {
    const S: &str = "switchnet";
    let (d, eta, c) = (3, 0.25, 2.0);
    let mut rng = WalkRng::new(seed, STREAM_AUX);
    let (mut passed, mut identity_fail) = (0usize, 0usize);
    for _ in 0..nets {
        let net = build_network(d, eta, eta, c, &mut rng).expect("network parameters");
        let fwd = exact_lift_counts(&net).unwrap();
        let rev = exact_lift_counts_reverse(&net).unwrap();
        let total_ok = fwd.total() == num_bigint::BigUint::from(1u8) << fwd.r;
        if fwd != rev || !total_ok {
            identity_fail += 1;
        }
        if audit_pointwise(&fwd.distribution(), eta) {
            passed += 1;
        }
    }
    let rate = passed as f64 / nets.max(1) as f64;

    let g = crate::gen::one_gadget_graph();
    let (reduced, trace) = suppress_degree_one(&g).unwrap();
    let params = ExpandParams { eta, delta: eta, c, gadget_min_degree: 3 };
    let map = expand_graph(&g, &reduced, trace, &params, &mut rng).expect("expansion");
    let mut broken = 0;
    for _ in 0..settings {
        let t = random_system(&map.expanded, &mut rng);
        match map.contract(&t) {
            Ok(ct) if ct.cycle_count() == t.cycle_count() => {}
            _ => broken += 1,
        }
    }
    vec![
        Check::at_least(S, "audit_pass_rate", rate, 0.67, nets),
        Check::at_most(S, "lift_identity_failures", identity_fail as f64, 0.0, nets),
        Check::at_most(S, "gadgets_in_test_graph_minus_1", (map.gadgets.len() as f64 - 1.0).abs(), 0.0, 1),
        Check::at_most(S, "cycle_count_changes", broken as f64, 0.0, settings),
    ]
}

/// Uniform random pairing at every vertex.
pub fn random_system(g: &DirectedMultigraph, rng: &mut WalkRng) -> TransitionSystem {
    let mut succ = vec![0; g.arc_count()];
    for v in 0..g.vertex_count() {
        let mut outs = g.out_arcs(v).to_vec();
        rng.shuffle(&mut outs);
        for (&e, &f) in g.in_arcs(v).iter().zip(&outs) {
            succ[e] = f;
        }
    }
    TransitionSystem::new(g, succ).expect("pairing is a bijection")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for c in chain_suite(6, 8, 1)
            .into_iter()
            .chain(oracle_suite(5, 10, 2))
            .chain(chords_suite(64, 2000, 256, 3))
            .chain(switchnet_suite(10, 50, 4))
        {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn small_skewdet_passes() {
        let p = SkewdetParams { gap_n_max: 5, n_max: 4, seeds: 3, lsi_trials: 50, covering_matrices: 6, seed: 5 };
        for c in skewdet_suite(&p).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn flip_mask_of_reference_is_empty() {
        let g = crate::gen::regular2(5, &mut WalkRng::from_seed(2)).unwrap();
        let t = hierholzer_tour(&g).unwrap();
        assert_eq!(flip_mask(&g, &t.transition_system(), &t), 0);
    }
}
