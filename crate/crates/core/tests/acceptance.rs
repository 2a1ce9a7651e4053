//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so the lines survive libtest output capture.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use covertq::capacity::{capacity_report, covert_eg_capacity};
use covertq::channel::{build_covert_channel, excitation_channel, BinaryCovertChannel, StinespringIsometry};
use covertq::divergence::{chi_square, helstrom_error, qre};
use covertq::eg::{
    build_decoupler, decoding_povm, eg_report, ideal_state, protocol_state, protocol_state_branch, sample_eg_code,
    uhlmann_isometry, Decoupler, DecouplingTarget, EgOptions, EgToyCode, PovmChoice,
};
use covertq::operator::{
    eigh, fidelity, max_abs, nonneg_eigenspace_projector, pinching, reduced_from_vector, tensor, tensor_all,
    tensor_power, trace_norm, CMatrix, CVector, DensityOperator, PureState, Tolerances, C64,
};
use covertq::random::{random_channel, random_density, random_pure};
use covertq::sim::{
    covertness_report, covertness_scaling, resolvability_experiment, sample_codebook_indexed,
    sqrt_measurement_decoder, Codebook, Povm, SimConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Published spot values are rounded to about five digits.
const LITERAL_TOL: f64 = 5e-5;

#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn density(m: CMatrix) -> DensityOperator {
    DensityOperator::new(m, &tol()).unwrap()
}

fn excitation(g: f64) -> StinespringIsometry {
    excitation_channel(g).unwrap().to_stinespring()
}

fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

// ---------------------------------------------------------------- criterion 1

fn closed_form_eg(g: f64) -> f64 {
    if g >= 0.5 {
        0.0
    } else {
        ((1.0 - g) / g).ln() * (2.0 * (1.0 - g) / g).sqrt()
    }
}

fn criterion_1(c: &mut Checks) {
    let t = tol();
    let mut worst = 0.0f64;
    for k in 1..=99 {
        let g = k as f64 / 100.0;
        let pipeline = covert_eg_capacity(&excitation(g), &t).unwrap();
        let err = (pipeline - closed_form_eg(g)).abs();
        worst = worst.max(err);
        c.check(err <= 1e-9, format!("gamma={g}: pipeline {pipeline} vs {}", closed_form_eg(g)));
    }
    c.note(format!("max |pipeline - closed form| over 99 points = {worst:.2e} (tol 1e-9)"));
    for (g, lit) in [(0.1, 9.322001), (0.25, 2.691035), (0.5, 0.0)] {
        let v = covert_eg_capacity(&excitation(g), &t).unwrap();
        let ok = if lit == 0.0 { v == 0.0 } else { (v - lit).abs() < LITERAL_TOL };
        c.check(ok, format!("spot gamma={g}: {v} vs {lit}"));
        c.note(format!("gamma={g} -> {v:.7}"));
    }
}

// ---------------------------------------------------------------- criterion 2

fn mixture(sigma: &DensityOperator, rho: &DensityOperator, a: f64) -> DensityOperator {
    density(sigma.matrix().scale(1.0 - a) + rho.matrix().scale(a))
}

/// `f(a) = D(sigma + a (rho - sigma) || sigma)`, also for small negative `a`.
fn curve(sigma: &DensityOperator, rho: &DensityOperator, a: f64) -> f64 {
    qre(&mixture(sigma, rho, a), sigma, &tol()).unwrap().as_f64()
}

fn richardson_curvature(sigma: &DensityOperator, rho: &DensityOperator) -> f64 {
    // (1 + h) sigma - h rho stays positive for h < lambda_min(sigma)
    let lmin = sigma.eigh().values.iter().copied().fold(f64::INFINITY, f64::min);
    let h = (0.1 * lmin).min(0.05);
    let second = |h: f64| (curve(sigma, rho, h) + curve(sigma, rho, -h)) / (h * h);
    (4.0 * second(h / 2.0) - second(h)) / 3.0
}

fn criterion_2(c: &mut Checks) {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_rel, mut worst_ratio) = (0.0f64, 0.0f64);
    for (dim, count) in [(2, 50), (3, 20)] {
        for _ in 0..count {
            let rho = random_density(dim, dim, &mut rng);
            let sigma = random_density(dim, dim, &mut rng);
            let eta = chi_square(&rho, &sigma, &t).unwrap();
            let fd = richardson_curvature(&sigma, &rho);
            let rel = (eta - fd).abs() / fd.abs();
            worst_rel = worst_rel.max(rel);
            c.check(rel < 1e-4, format!("dim {dim}: eta {eta} vs finite difference {fd}"));

            // Taylor remainder bound: |f'''| <= ||Delta||_1 ||Delta||^2 / lambda^2 on [0, 0.1]
            let delta = rho.matrix() - sigma.matrix();
            let lmin = sigma.eigh().values.iter().copied().fold(f64::INFINITY, f64::min);
            let lambda = 0.9 * lmin;
            let bound = trace_norm(&delta) * operator_norm(&delta).powi(2) / (6.0 * lambda * lambda);
            for a in [0.1, 0.05, 0.025] {
                let d = qre(&mixture(&sigma, &rho, a), &sigma, &t).unwrap().as_f64();
                let r = (d - 0.5 * a * a * eta) / (a * a * a);
                worst_ratio = worst_ratio.max(r.abs() / bound);
                c.check(r.is_finite() && r.abs() <= bound, format!("dim {dim} a={a}: remainder {r} > bound {bound}"));
            }
        }
    }
    c.note(format!(
        "70 pairs; max relative |eta - curvature| = {worst_rel:.2e} (tol 1e-4); max |remainder|/bound = {worst_ratio:.3}"
    ));
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3(c: &mut Checks) {
    let r = capacity_report(&excitation(0.25), &tol()).unwrap();
    // sigma0 = omega0 = diag(3/4, 1/4), sigma1 = |1><1|, omega1 = |0><0|
    let d_bob = 4f64.ln();
    let d_willie = (4.0f64 / 3.0).ln();
    let chi2: f64 = 1.0 / 0.75 - 1.0;
    let denom = (chi2 / 2.0).sqrt();
    let exact = [
        ("dBob", r.d_bob, d_bob, 1e-12, None),
        ("dWillie", r.d_willie, d_willie, 1e-12, None),
        ("chi2", r.chi2_willie, chi2, 1e-12, None),
        ("cSKey", r.c_s_key, d_bob / denom, 1e-6, Some(3.395715)),
        ("cS", r.c_s, (d_bob - d_willie) / denom, 1e-6, Some(2.691035)),
        ("cEG", r.c_eg, (d_bob - d_willie) / denom, 1e-6, Some(2.691035)),
        ("lKeyMin", r.l_key_min, d_willie / denom, 1e-6, Some(0.704672)),
    ];
    for (name, got, oracle, tolerance, literal) in exact {
        c.check((got - oracle).abs() <= tolerance, format!("{name}: {got} vs oracle {oracle}"));
        if let Some(lit) = literal {
            c.check((got - lit).abs() < LITERAL_TOL, format!("{name}: {got} vs published {lit}"));
        }
    }
    c.check(r.c_s == r.c_eg, "cS != cEG");
    c.note(format!(
        "cSKey={:.7} cS=cEG={:.7} lKeyMin={:.7}",
        r.c_s_key, r.c_eg, r.l_key_min
    ));
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4(c: &mut Checks) {
    let t = tol();
    let ch = build_covert_channel(&excitation(0.25), &t).unwrap();
    let mut means = Vec::new();
    for (m, l) in [(4, 4), (8, 8), (16, 16)] {
        let mut cfg = SimConfig::with_alpha(8, 0.25, m, l, 7).unwrap();
        cfg.samples = 200;
        let r = resolvability_experiment(&cfg, &ch, &t).unwrap();
        c.check(
            r.empirical_mean_distance <= r.rhs + 3.0 * r.standard_error,
            format!("K={}: mean {} > rhs {} + 3 se", m * l, r.empirical_mean_distance, r.rhs),
        );
        c.note(format!(
            "K={}: mean {:.5} (se {:.1e}) <= rhs {:.4}",
            m * l,
            r.empirical_mean_distance,
            r.standard_error,
            r.rhs
        ));
        means.push(r.empirical_mean_distance);
    }
    c.check(means.windows(2).all(|w| w[1] < w[0]), format!("means not strictly decreasing: {means:?}"));
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5(c: &mut Checks) {
    let t = tol();
    let g = 0.25;
    let ch = build_covert_channel(&excitation(g), &t).unwrap();
    let ns: Vec<usize> = (16..=144).collect();
    let pts = covertness_scaling(&ch, 0.7, &ns, &t).unwrap();
    // omega0 = diag(1 - g, g), omega1 = |0><0|, chi^2 = g / (1 - g)
    let limit = 0.5 * 0.49 * g / (1.0 - g);
    for p in &pts {
        let a = p.alpha;
        let (q0, q1) = (1.0 - g + a * g, g * (1.0 - a));
        let oracle = p.n as f64 * (q0 * (q0 / (1.0 - g)).ln() + q1 * (q1 / g).ln());
        c.check((p.n_divergence - oracle).abs() <= 1e-12 * oracle, format!("n={}: {} vs {oracle}", p.n, p.n_divergence));
        c.check((p.limit - limit).abs() < 1e-15, "limit mismatch");
    }
    let last = pts.last().unwrap();
    c.check(last.relative_deviation < 0.05, format!("n=144 deviation {}", last.relative_deviation));
    c.check(
        pts.windows(2).all(|w| w[1].relative_deviation < w[0].relative_deviation),
        "deviation not monotone for n >= 16",
    );
    c.note(format!(
        "deviation {:.2}% at n=16, {:.2}% at n=144 (limit 5%)",
        100.0 * pts[0].relative_deviation,
        100.0 * last.relative_deviation
    ));
}

// ---------------------------------------------------------------- criterion 6

/// Square-root measurement assembled from full `2^n`-dimensional matrices.
fn dense_decoder_errors(cb: &Codebook, ch: &BinaryCovertChannel, a: f64) -> Vec<f64> {
    let t = tol();
    let s0 = tensor_power(ch.sigma0().matrix(), cb.n);
    let letters = [ch.sigma0().matrix().clone(), ch.sigma1().matrix().clone()];
    let states: Vec<CMatrix> = cb
        .words()
        .iter()
        .map(|w| tensor_all(w.iter().map(|&x| &letters[x as usize])))
        .collect();
    let projectors: Vec<CMatrix> = states
        .iter()
        .map(|s| nonneg_eigenspace_projector(&(pinching(s, &s0, &t).unwrap() - s0.scale(a.exp())), &t).unwrap())
        .collect();
    let dim = s0.nrows();
    let sum = projectors.iter().fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
    let inv_sqrt = eigh(&sum).map(|x| if x > t.support_tol { 1.0 / x.sqrt() } else { 0.0 });
    states
        .iter()
        .zip(&projectors)
        .map(|(s, p)| 1.0 - (&inv_sqrt * p * &inv_sqrt * s).trace().re)
        .collect()
}

fn criterion_6(c: &mut Checks) {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let (mut worst_dec, mut worst_id) = (0.0f64, 0.0f64);
    for k in 0..10u64 {
        let v = random_channel(2, 2, 2, &mut rng).to_stinespring();
        let ch = build_covert_channel(&v, &t).unwrap();
        let (m, l) = if k % 2 == 0 { (2, 4) } else { (4, 2) };
        let cfg = SimConfig::with_alpha(6, 0.3, m, l, 100 + k).unwrap();
        let cb = sample_codebook_indexed(&cfg, 0);

        let rep = sqrt_measurement_decoder(&cb, &ch, &cfg, &t).unwrap();
        let oracle = dense_decoder_errors(&cb, &ch, rep.threshold);
        for (e, o) in rep.per_message_error.iter().zip(&oracle) {
            worst_dec = worst_dec.max((e.error - o).abs());
            c.check((e.error - o).abs() <= 1e-9, format!("instance {k}: decoder {} vs oracle {o}", e.error));
        }

        let cov = covertness_report(&cb, &ch, &cfg, &t).unwrap();
        let letters = [ch.omega0().matrix().clone(), ch.omega1().matrix().clone()];
        let avg = cb
            .words()
            .iter()
            .fold(CMatrix::zeros(64, 64), |acc, w| acc + tensor_all(w.iter().map(|&x| &letters[x as usize])))
            .unscale(cb.len() as f64);
        let (avg, innocent) = (density(avg), density(tensor_power(ch.omega0().matrix(), 6)));
        let td = trace_norm(&(avg.matrix() - innocent.matrix()));
        let d = qre(&avg, &innocent, &t).unwrap().as_f64();
        let helstrom = helstrom_error(&avg, &innocent).unwrap();
        for (got, want) in [
            (cov.trace_dist_to_innocent, td),
            (cov.d_covert.as_f64(), d),
            (cov.helstrom_error, helstrom),
            (cov.helstrom_error, 0.5 * (1.0 - 0.5 * td)),
        ] {
            worst_id = worst_id.max((got - want).abs());
            c.check((got - want).abs() <= 1e-9, format!("instance {k}: report {got} vs {want}"));
        }
        c.check(0.5 * td <= (0.5 * d).sqrt() + 1e-12, format!("instance {k}: Pinsker fails"));
        c.check(cov.helstrom_error >= cov.pinsker_lower_bound - 1e-12, format!("instance {k}: Helstrom below Pinsker bound"));
    }
    c.note(format!(
        "10 instances; max decoder deviation {worst_dec:.1e}, max report deviation {worst_id:.1e} (tol 1e-9)"
    ));
}

// ---------------------------------------------------------------- criterion 7

/// `op` applied to subsystem `k` of `psi`.
fn apply_on(psi: &CVector, dims: &[usize], k: usize, op: &CMatrix) -> (CVector, Vec<usize>) {
    let left: usize = dims[..k].iter().product();
    let right: usize = dims[k + 1..].iter().product();
    let out_dim = op.nrows();
    let mut out = CVector::zeros(left * out_dim * right);
    for a in 0..left {
        for c in 0..right {
            for i in 0..out_dim {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..dims[k] {
                    s += op[(i, j)] * psi[(a * dims[k] + j) * right + c];
                }
                out[(a * out_dim + i) * right + c] = s;
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[k] = out_dim;
    (out, new_dims)
}

/// Encoder, `V^{⊗n}`, coherent POVM, decoupler and phase correction as dense maps.
fn monolithic_fidelity(code: &EgToyCode, v: &StinespringIsometry, povm: &Povm, dec: &Decoupler, j: usize) -> f64 {
    let (t, l, n) = (code.message_dim, code.l_size, code.n);
    let (db, dw) = (v.dim_b(), v.dim_w());
    let (dbn, dwn, dan) = (db.pow(n as u32), dw.pow(n as u32), 1usize << n);
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * PI * (k % t) as f64 / t as f64);

    let mut enc = CMatrix::zeros(dan, t);
    for (k, w) in code.classical_words.iter().enumerate() {
        let m = k / l;
        let y = w.iter().fold(0, |acc, &b| 2 * acc + b as usize);
        enc[(y, m)] += omega(j * m) * C64::from_polar(1.0 / (l as f64).sqrt(), code.encode_phases[k]);
    }
    let mut vn = CMatrix::zeros(dbn * dwn, dan);
    for a in 0..dan {
        for b in 0..dbn {
            for w in 0..dwn {
                let mut amp = C64::new(1.0, 0.0);
                for i in 0..n {
                    let shift = n - 1 - i;
                    let ai = (a >> shift) & 1;
                    let bi = (b / db.pow(shift as u32)) % db;
                    let wi = (w / dw.pow(shift as u32)) % dw;
                    amp *= v.matrix()[(bi * dw + wi, ai)];
                }
                vn[(b * dwn + w, a)] = amp;
            }
        }
    }
    let kcount = t * l;
    let mut d = CMatrix::zeros(dbn * kcount, dbn);
    for k in 0..kcount {
        let e = if k == 0 { &povm.elements[0] + &povm.remainder } else { povm.elements[k].clone() };
        let kr = eigh(&e).map(|x| x.max(0.0).sqrt());
        for b in 0..dbn {
            for b2 in 0..dbn {
                d[(b * kcount + k, b2)] = kr[(b, b2)];
            }
        }
    }
    let dc = dec.target.ncols();
    let mut delta = CMatrix::zeros(t * dc, dbn * kcount);
    let mut z = CMatrix::zeros(t * dc, t * dc);
    for mh in 0..t {
        for c in 0..dc {
            z[(mh * dc + c, mh * dc + c)] = omega(j * mh).conj();
            for b in 0..dbn {
                for lh in 0..l {
                    delta[(mh * dc + c, b * kcount + mh * l + lh)] = dec.gammas[mh][(c, b * l + lh)];
                }
            }
        }
    }
    let phi = PureState::maximally_entangled(t);
    let (psi, dims) = apply_on(phi.amplitudes(), &[t, t], 1, &enc);
    let (psi, _) = apply_on(&psi, &dims, 1, &vn);
    let (psi, dims) = apply_on(&psi, &[t, dbn, dwn], 1, &d);
    let (psi, dims) = apply_on(&psi, &dims, 1, &delta);
    let (psi, _) = apply_on(&psi, &dims, 1, &z);
    let rho = reduced_from_vector(&psi, &[t, t, dc, dwn], &[0, 1]).unwrap();
    (phi.amplitudes().adjoint() * rho * phi.amplitudes())[(0, 0)].re
}

fn criterion_7(c: &mut Checks) {
    let t = tol();

    // noiseless channel, disjoint codewords
    let noiseless = StinespringIsometry::identity(2);
    let code = EgToyCode::from_strings(2, 2, &["00", "11", "01", "10"]).unwrap();
    let opts = EgOptions {
        povm: PovmChoice::CodewordProjectors,
        target: DecouplingTarget::SelfTarget,
        ..EgOptions::new(0.5)
    };
    let (_, r) = eg_report(&code, &noiseless, &opts, &t).unwrap();
    c.check((r.fidelity - 1.0).abs() <= 1e-9, format!("noiseless fidelity {}", r.fidelity));
    // trace distance 2 sqrt(1 - |overlap|^2): 2e-6 corresponds to 1 - |overlap|^2 <= 1e-12
    c.check(r.trace_distance_ghz <= 2e-6, format!("noiseless decoupling distance {}", r.trace_distance_ghz));
    c.note(format!("noiseless F={:.9} decoupling distance {:.1e}", r.fidelity, r.trace_distance_ghz));

    // generic instance against the monolithic oracle
    let v = excitation(0.1);
    let code = sample_eg_code(4, 2, 2, 0.5, 42).unwrap();
    let mut worst = 0.0f64;
    for target in [DecouplingTarget::OmegaAlpha, DecouplingTarget::SelfTarget] {
        let opts = EgOptions {
            target,
            ..EgOptions::new(0.5)
        };
        let (used, r) = eg_report(&code, &v, &opts, &t).unwrap();
        let povm = decoding_povm(&used, &v, &opts, &t).unwrap();
        let dec = build_decoupler(&used, &v, target, opts.alpha).unwrap();
        for j in 0..2 {
            let oracle = monolithic_fidelity(&used, &v, &povm, &dec, j);
            worst = worst.max((oracle - r.per_j_fidelity[j]).abs());
            c.check((oracle - r.per_j_fidelity[j]).abs() <= 1e-9, format!("{target:?} j={j}: {} vs {oracle}", r.per_j_fidelity[j]));
        }
        c.check((0.0..=1.0).contains(&r.fidelity), "fidelity outside [0, 1]");
        c.note(format!("{target:?} F={:.6}", r.fidelity));
    }
    c.note(format!("oracle deviation {worst:.1e}"));

    // Uhlmann on random purification pairs
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_u = 0.0f64;
    for k in 0..20 {
        let da = 2 + k % 3;
        let db = da + k % 2;
        let dc = db + (k / 2) % 3;
        let psi = random_pure(da * db, &mut rng);
        let theta = random_pure(da * dc, &mut rng);
        let u = uhlmann_isometry(&psi, &theta, da).unwrap();
        let ra = density(reduced_from_vector(psi.amplitudes(), &[da, db], &[0]).unwrap());
        let ta = density(reduced_from_vector(theta.amplitudes(), &[da, dc], &[0]).unwrap());
        let achieved = theta.amplitudes().dotc(&(tensor(&CMatrix::identity(da, da), &u.isometry) * psi.amplitudes()));
        let err = (achieved.norm_sqr() - fidelity(&ra, &ta).unwrap()).abs();
        worst_u = worst_u.max(err);
        c.check(err <= 1e-9, format!("Uhlmann pair {k}: deviation {err}"));
    }
    c.note(format!("Uhlmann max deviation {worst_u:.1e}"));

    // Willie's marginal under per-message phases, assistance outcomes and decode phases
    let povm = decoding_povm(&code, &v, &EgOptions::new(0.5), &t).unwrap();
    let base = protocol_state(&code, &v, &povm, 1 << 22).unwrap().willie_state();
    let mut worst_p = 0.0f64;
    for j in 0..2 {
        let w = protocol_state_branch(&code, &v, &povm, j, 1 << 22).unwrap().willie_state();
        worst_p = worst_p.max(max_abs(&(w.matrix() - base.matrix())));
    }
    let mut shifted = code.clone();
    for (k, p) in shifted.encode_phases.iter_mut().enumerate() {
        *p += [1.3, -0.4][k / 2];
    }
    let w = protocol_state(&shifted, &v, &povm, 1 << 22).unwrap().willie_state();
    worst_p = worst_p.max(max_abs(&(w.matrix() - base.matrix())));
    let mut h = code.clone();
    h.decode_phases = vec![0.5, -2.0, 1.5, 3.0];
    let (e0, e1) = (ideal_state(&code, &v).unwrap(), ideal_state(&h, &v).unwrap());
    for m in 0..2 {
        worst_p = worst_p.max(max_abs(&(e0.bin_state(m) - e1.bin_state(m))));
    }
    c.check(worst_p <= 1e-12, format!("phase invariance deviation {worst_p}"));
    c.note(format!("phase invariance deviation {worst_p:.1e}"));
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8(c: &mut Checks) {
    let t = tol();
    for g in [0.5, 0.6, 0.75, 0.9] {
        let v = excitation(g);
        let ch = build_covert_channel(&v, &t).unwrap();
        let d_bob = qre(ch.sigma1(), ch.sigma0(), &t).unwrap().as_f64();
        let d_willie = qre(ch.omega1(), ch.omega0(), &t).unwrap().as_f64();
        // equality at gamma = 1/2 holds up to roundoff
        c.check(d_bob <= d_willie * (1.0 + 1e-12), format!("gamma={g}: D(s1||s0)={d_bob} > D(w1||w0)={d_willie}"));
        let c_eg = covert_eg_capacity(&v, &t).unwrap();
        c.check(c_eg == 0.0, format!("gamma={g}: cEG={c_eg}"));
        c.check(capacity_report(&v, &t).unwrap().anti_degraded_flag, format!("gamma={g}: flag not set"));
        c.note(format!("gamma={g}: {d_bob:.4} <= {d_willie:.4}"));
    }
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u32, &str, fn(&mut Checks), Duration); 8] = [
        (1, "capacity curve reproduction", criterion_1, Duration::from_secs(2)),
        (2, "chi-square equals curvature", criterion_2, Duration::from_secs(10)),
        (3, "capacity cross-identities", criterion_3, Duration::from_secs(1)),
        (4, "resolvability inequality", criterion_4, Duration::from_secs(120)),
        (5, "covertness scaling", criterion_5, Duration::from_secs(1)),
        (6, "decoder oracle equivalence", criterion_6, Duration::from_secs(60)),
        (7, "EG protocol exactness", criterion_7, Duration::from_secs(60)),
        (8, "anti-degradability", criterion_8, Duration::from_secs(1)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (id, name, run, limit) in criteria {
        let mut c = Checks::default();
        let start = Instant::now();
        run(&mut c);
        let elapsed = start.elapsed();
        c.check(elapsed < limit, format!("runtime {elapsed:?} over {limit:?}"));
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        writeln!(
            err,
            "criterion {id} [{status}] {name}: {}; {:.3}s (limit {}s)",
            c.notes.join("; "),
            elapsed.as_secs_f64(),
            limit.as_secs()
        )
        .unwrap();
        for f in c.failures.iter().take(5) {
            writeln!(err, "    {f}").unwrap();
        }
        if !c.failures.is_empty() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
