//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one line per criterion and exits nonzero if any assertive one fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qcorr::classical::{lambda_star_bounds, separable_lambda_bound};
use qcorr::experiments::product_state_realization;
use qcorr::membership::{
    caratheodory_quantum, critical_weight_in, max_chsh_q2, nearest_in_l_lambda, nearest_in_q2,
};
use qcorr::quantum::{
    born_box, direct_sum, qubit_box_analytic, BinaryMeasurement, HybridRealization,
    QubitRealization, SchmidtState,
};
use qcorr::scenario::{
    canonical_box, is_product_box, mix_boxes, ns_dimension, probs_from_correlators, scarani_probs,
};
use qcorr::{BellScenario, BoxLabel, CorrelatorBox, ProbBox, SetDescriptor, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    Report,
}

struct Line {
    id: usize,
    name: &'static str,
    status: Status,
    detail: String,
}

fn assertive(id: usize, name: &'static str, ok: bool, detail: String) -> Line {
    Line {
        id,
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn pb(l: BoxLabel) -> ProbBox {
    probs_from_correlators(&canonical_box(l)).unwrap()
}

/// Largest `v3` weight inside `set` on the slice where `v2` has weight `c`.
fn slice(v: [BoxLabel; 3], c: f64, set: SetDescriptor, cfg: &SolverConfig, tol: f64) -> f64 {
    let [v1, v2, v3] = v.map(pb);
    let anchor = mix_boxes(&[v1, v2.clone()], &[1.0 - c, c]).unwrap();
    let direction = mix_boxes(&[v2, v3], &[c, 1.0 - c]).unwrap();
    critical_weight_in(&anchor, &direction, set, cfg, tol)
        .unwrap()
        .value
        * (1.0 - c)
}

fn boundary_error(
    v: [BoxLabel; 3],
    set: SetDescriptor,
    cfg: &SolverConfig,
    tol: f64,
    reference: impl Fn(f64) -> f64,
) -> (f64, String) {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for c in [0.0, 0.25, 0.5, 0.75] {
        let got = slice(v, c, set, cfg, tol);
        let want = reference(c);
        worst = worst.max((got - want).abs());
        parts.push(format!("{got:.4}/{want:.4}"));
    }
    (worst, parts.join(" "))
}

fn criterion_1(cfg: &SolverConfig) -> Line {
    let start = Instant::now();
    let m = max_chsh_q2(cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = (m.value - 2.0 * SQRT_2).abs();
    assertive(
        1,
        "Tsirelson bound",
        err <= 1e-4 && secs < 60.0,
        format!(
            "max CHSH {:.10} (|err| {err:.1e} <= 1e-4), {secs:.2}s",
            m.value
        ),
    )
}

fn criterion_2(cfg: &SolverConfig) -> Line {
    use BoxLabel::*;
    let (worst, pts) = boundary_error([P0, P1, P3to4], SetDescriptor::Qubit, cfg, 1e-3, |c| {
        (1.0 - c).powf(1.5)
    });
    assertive(
        2,
        "qubit boundary towards P3:4",
        worst <= 0.01,
        format!("max |err| {worst:.2e} <= 0.01 [{pts}]"),
    )
}

fn criterion_3(cfg: &SolverConfig) -> Vec<Line> {
    use BoxLabel::*;
    let tri = [P0, P1, Tsirelson];
    let (local, lp) = boundary_error(tri, SetDescriptor::Local, cfg, 1e-9, |c| (1.0 - c) / SQRT_2);
    let (q2, qp) = boundary_error(tri, SetDescriptor::Qubit, cfg, 1e-3, |c| {
        (1.0 - c).powf(1.25)
    });
    let (pvm, pp) = boundary_error(tri, SetDescriptor::QubitPvm, cfg, 1e-3, |c| {
        (1.0 - c).powf(1.5)
    });
    vec![
        assertive(
            3,
            "local boundary towards PTB",
            local <= 1e-6,
            format!("max |err| {local:.2e} <= 1e-6 [{lp}]"),
        ),
        assertive(
            3,
            "qubit boundary towards PTB",
            q2 <= 0.01,
            format!("max |err| {q2:.2e} <= 0.01 [{qp}]"),
        ),
        Line {
            id: 3,
            name: "projective boundary towards PTB (report-only)",
            status: Status::Report,
            detail: format!(
                "max |err| {pvm:.2e}, {} 0.02 [{pp}]",
                if pvm <= 0.02 { "within" } else { "outside" }
            ),
        },
    ]
}

fn triangle(w: [f64; 3]) -> CorrelatorBox {
    use BoxLabel::*;
    CorrelatorBox::mix(&[P1, P3, P4].map(canonical_box), &w).unwrap()
}

fn criterion_4(cfg: &SolverConfig) -> Line {
    let wide = SolverConfig {
        restarts: 256,
        ..cfg.clone()
    };
    let centroid = nearest_in_q2(&triangle([1.0 / 3.0; 3]), &wide).unwrap();
    let mut edge = 0.0f64;
    for w in [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]] {
        edge = edge.max(nearest_in_q2(&triangle(w), cfg).unwrap().best_distance);
    }
    assertive(
        4,
        "nonconvexity of the P1,P3,P4 triangle (heuristic)",
        centroid.best_distance > 1e-3 && edge < 1e-6,
        format!(
            "centroid distance {:.4} > 1e-3 over {} restarts; edge midpoints {edge:.1e} < 1e-6",
            centroid.best_distance, centroid.restarts_used
        ),
    )
}

fn criterion_5(cfg: &SolverConfig) -> Line {
    let target = canonical_box(BoxLabel::P1to4);
    let explicit = qubit_box_analytic(&QubitRealization::bell_pair_zx())
        .unwrap()
        .distance(&target);
    let p = pb(BoxLabel::P1to4);
    let l4 = nearest_in_l_lambda(&p, 4, cfg).unwrap().best_distance;
    let wide = SolverConfig {
        restarts: 1000,
        ..cfg.clone()
    };
    let l3 = nearest_in_l_lambda(&p, 3, &wide).unwrap();
    assertive(
        5,
        "super-locality of P1:4 (L3 part heuristic)",
        explicit < 1e-8 && l4 < 1e-6 && l3.best_distance > 1e-3,
        format!(
            "Q2 via sigma_Z/sigma_X {explicit:.1e} < 1e-8; L4 {l4:.1e} < 1e-6; L3 {:.4} > 1e-3 over {} restarts",
            l3.best_distance, l3.restarts_used
        ),
    )
}

fn random_measurement(rng: &mut ChaCha8Rng) -> BinaryMeasurement {
    let eta: f64 = rng.gen_range(0.0..=1.0);
    let kappa = rng.gen_range(-1.0..=1.0) * (1.0 - eta);
    BinaryMeasurement::new(kappa, eta, rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU))
}

fn random_qubit(rng: &mut ChaCha8Rng) -> QubitRealization {
    let state = SchmidtState::new(rng.gen_range(0.0..=PI)).unwrap();
    let a = [random_measurement(rng), random_measurement(rng)];
    let b = [random_measurement(rng), random_measurement(rng)];
    QubitRealization::new(state, a, b).unwrap()
}

fn criterion_6() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut dims = true;
    for _ in 0..50 {
        let (a, b) = (random_qubit(&mut rng), random_qubit(&mut rng));
        let w: f64 = rng.gen_range(0.0..=1.0);
        let h = HybridRealization::new(vec![w, 1.0 - w], vec![a.into(), b.into()]).unwrap();
        let g = direct_sum(&h).unwrap();
        dims &= g.dims() == [4, 4];
        // oracle: the weighted sum of the two closed-form boxes
        let pa = probs_from_correlators(&qubit_box_analytic(&a).unwrap()).unwrap();
        let pb = probs_from_correlators(&qubit_box_analytic(&b).unwrap()).unwrap();
        let born = born_box(&g).unwrap();
        for i in 0..born.table().len() {
            let want = w * pa.table()[i] + (1.0 - w) * pb.table()[i];
            worst = worst.max((born.table()[i] - want).abs());
        }
    }
    assertive(
        6,
        "direct-sum convexification",
        worst <= 1e-12 && dims,
        format!("50 random pairs, max entrywise {worst:.1e} <= 1e-12, local dimension 4: {dims}"),
    )
}

fn criterion_7() -> Line {
    let s = |n, m, v| BellScenario::new(n, m, v).unwrap();
    let f = ns_dimension(&s(2, 2, 2));
    let b222 = lambda_star_bounds(&s(2, 2, 2));
    let b232 = lambda_star_bounds(&s(2, 3, 2));
    let q = caratheodory_quantum(&s(2, 2, 2));
    let sep = separable_lambda_bound(2, 2);
    let ok = f == 8
        && (b222.lower, b222.upper) == (4, 4)
        && b232.lower == 7
        && (q.upper, q.masanes_dim) == (8, Some(16))
        && sep == 4;
    assertive(
        7,
        "formula suite",
        ok,
        format!(
            "F={f} lambda*=({},{}) lower(2,3,2)={} quantum=({},{:?}) separable={sep}",
            b222.lower, b222.upper, b232.lower, q.upper, q.masanes_dim
        ),
    )
}

/// Effects built from the POVM formula with explicit Pauli matrices.
fn effects(m: &BinaryMeasurement) -> [DMatrix<C>; 2] {
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let id = DMatrix::from_row_slice(2, 2, &[one, z, z, one]);
    let sx = DMatrix::from_row_slice(2, 2, &[z, one, one, z]);
    let sy = DMatrix::from_row_slice(2, 2, &[z, C::new(0.0, -1.0), C::new(0.0, 1.0), z]);
    let sz = DMatrix::from_row_slice(2, 2, &[one, z, z, -one]);
    let n = [
        m.theta.sin() * m.phi.cos(),
        m.theta.sin() * m.phi.sin(),
        m.theta.cos(),
    ];
    let ns = sx * C::from(n[0]) + sy * C::from(n[1]) + sz * C::from(n[2]);
    [-1.0, 1.0]
        .map(|s| (&id * C::from(1.0 + s * m.kappa) + &ns * C::from(s * m.eta)) * C::from(0.5))
}

fn trace_box(q: &QubitRealization) -> [[[[f64; 2]; 2]; 2]; 2] {
    let (s, c) = (q.state.alpha / 2.0).sin_cos();
    let psi = DVector::from_vec(vec![C::from(c), C::from(0.0), C::from(0.0), C::from(s)]);
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            let (ea, eb) = (effects(&q.alice[x]), effects(&q.bob[y]));
            for a in 0..2 {
                for b in 0..2 {
                    let op = ea[a].kronecker(&eb[b]);
                    out[x][y][a][b] = (psi.adjoint() * op * &psi)[(0, 0)].re;
                }
            }
        }
    }
    out
}

fn criterion_8() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let q = random_qubit(&mut rng);
        let analytic = probs_from_correlators(&qubit_box_analytic(&q).unwrap()).unwrap();
        let traced = trace_box(&q);
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let d = (analytic.prob(&[x, y], &[a, b]) - traced[x][y][a][b]).abs();
                        worst = worst.max(d);
                    }
                }
            }
        }
    }
    assertive(
        8,
        "closed form against explicit traces",
        worst <= 1e-10,
        format!("1000 random realizations, max |diff| {worst:.1e} <= 1e-10"),
    )
}

fn criterion_9(cfg: &SolverConfig) -> Line {
    let s = BellScenario::CHSH;
    let mut table = vec![0.0; s.table_len()];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                table[s.index(&[x, y], &[a, a])] = 0.5;
            }
        }
    }
    let correlated = ProbBox::new(s, table).unwrap();
    let product = is_product_box(&correlated, 1e-9);
    let l2 = nearest_in_l_lambda(&correlated, 2, cfg)
        .unwrap()
        .best_distance;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_search = 0.0f64;
    let mut worst_explicit = 0.0f64;
    let mut endpoints = true;
    for k in 0..24 {
        let m: [f64; 4] = if k < 16 {
            std::array::from_fn(|i| if (k >> i) & 1 == 1 { 1.0 } else { -1.0 })
        } else {
            std::array::from_fn(|_| rng.gen_range(-1.0..=1.0))
        };
        let b = CorrelatorBox::new(m, [m[0] * m[2], m[1] * m[2], m[0] * m[3], m[1] * m[3]]);
        let q = product_state_realization(&b).unwrap();
        endpoints &= q.state.alpha == 0.0 || q.state.alpha == PI;
        worst_explicit = worst_explicit.max(qubit_box_analytic(&q).unwrap().distance(&b));
        worst_search = worst_search.max(nearest_in_q2(&b, cfg).unwrap().best_distance);
    }
    assertive(
        9,
        "perfect correlation and product boxes",
        !product && l2 < 1e-8 && worst_search < 1e-6 && worst_explicit < 1e-6 && endpoints,
        format!(
            "correlated box: product={product}, L2 {l2:.1e} < 1e-8; 24 product boxes: search {worst_search:.1e}, \
             product-state construction {worst_explicit:.1e} < 1e-6"
        ),
    )
}

fn criterion_10() -> Line {
    let p = scarani_probs();
    let e = |x: usize, y: usize| {
        (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| if a == b { 1.0 } else { -1.0 } * p.prob(&[x, y], &[a, b]))
            .sum::<f64>()
    };
    let chsh = e(0, 0) + e(1, 0) + e(0, 1) - e(1, 1);
    Line {
        id: 10,
        name: "CHSH of the box listed as separable (report-only)",
        status: Status::Report,
        detail: format!(
            "computed {chsh:.10}, expected 2*sqrt(2) = {:.10}; separability not asserted",
            2.0 * SQRT_2
        ),
    }
}

fn main() {
    let cfg = SolverConfig::default();
    let start = Instant::now();
    let mut lines = vec![criterion_1(&cfg), criterion_2(&cfg)];
    lines.extend(criterion_3(&cfg));
    lines.push(criterion_4(&cfg));
    lines.push(criterion_5(&cfg));
    lines.push(criterion_6());
    lines.push(criterion_7());
    lines.push(criterion_8());
    lines.push(criterion_9(&cfg));
    lines.push(criterion_10());

    let mut failed = 0;
    for l in &lines {
        let tag = match l.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Report => "REPORT",
        };
        println!("criterion {:>2} {tag:<6} {}: {}", l.id, l.name, l.detail);
    }
    println!(
        "acceptance: {} lines, {failed} failed, {:.1}s",
        lines.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
