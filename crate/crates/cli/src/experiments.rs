use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use scaledgauge_core::convergence::fit_loglog;
use scaledgauge_core::field_calculus::{
    anchor_dependence_report, covariant_derivative, first_order_covariant, plain_derivative, ComplexLatticeField,
};
use scaledgauge_core::gauge_field::RealGaugeField;
use scaledgauge_core::gauge_theory::lagrangian::{lagrangian_density, DensityKind, DensityTerms};
use scaledgauge_core::gauge_theory::su2::{
    dot_tau, gauge_transform_su2, pauli, structure_constant, su2_covariance_residual, su2_exp, su2_link, Mat2, SU2Config,
};
use scaledgauge_core::gauge_theory::{
    abelian_cov_derivative, abelian_covariance_residual, field_strength, gauge_transform_abelian, AbelianConfig,
    CovariancePoint, CovarianceStudy, DerivativeMode, GaugeTransformation, MultipletField,
};
use scaledgauge_core::lattice::{LatticePath, LatticeSpec, Site, Step};
use scaledgauge_core::rng::{complex_in_shell, complex_unit_box, seeded};
use scaledgauge_core::scaled_hilbert::{unitarity_deviation, HilbertVector, ScaledHilbertStructure, UnitaryMatrix};
use scaledgauge_core::scaled_numbers::{
    axiom_suite, element_of, exp_coefficients, ScaleFactor, ScaledStructure, StructureValue,
};
use scaledgauge_core::{Error, Result};

use crate::config::{series_lattices, ExperimentConfig};
use crate::fixtures;
use crate::reference::{scalar_qed, spinor_qed, u1_derivative, QedDerivative, QedTerms};
use crate::report::{num, Check, ExperimentReport, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Experiment {
    Axioms,
    Transport,
    Integrability,
    DerivativeConvergence,
    Hilbert,
    GaugeAbelian,
    GaugeSu2,
    Action,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Axioms,
        Experiment::Transport,
        Experiment::Integrability,
        Experiment::DerivativeConvergence,
        Experiment::Hilbert,
        Experiment::GaugeAbelian,
        Experiment::GaugeSu2,
        Experiment::Action,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Axioms => "axioms",
            Experiment::Transport => "transport",
            Experiment::Integrability => "integrability",
            Experiment::DerivativeConvergence => "derivative-convergence",
            Experiment::Hilbert => "hilbert",
            Experiment::GaugeAbelian => "gauge-abelian",
            Experiment::GaugeSu2 => "gauge-su2",
            Experiment::Action => "action",
        }
    }

    fn seed_offset(self) -> u64 {
        Experiment::ALL.iter().position(|e| *e == self).unwrap() as u64 * 0x9E37_79B9
    }
}

pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    let start = Instant::now();
    let seed = seed.wrapping_add(exp.seed_offset());
    let mut report = ExperimentReport::new(exp.name());
    match exp {
        Experiment::Axioms => axioms(cfg, seed, &mut report)?,
        Experiment::Transport => transport(cfg, seed, &mut report)?,
        Experiment::Integrability => integrability(cfg, &mut report)?,
        Experiment::DerivativeConvergence => derivative_convergence(cfg, &mut report)?,
        Experiment::Hilbert => hilbert(cfg, seed, &mut report)?,
        Experiment::GaugeAbelian => gauge_abelian(cfg, &mut report)?,
        Experiment::GaugeSu2 => gauge_su2(cfg, seed, &mut report)?,
        Experiment::Action => action(cfg, &mut report)?,
    }
    report.duration = start.elapsed();
    Ok(report)
}

fn site_label(s: &Site, dims: usize) -> String {
    s.coords()[..dims].iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm().max(1.0)
    }
}

fn axioms(cfg: &ExperimentConfig, seed: u64, report: &mut ExperimentReport) -> Result<()> {
    let ac = &cfg.axioms;
    let tol = cfg.tolerances.axiom;
    let mut table = Table::new("axioms", &["scale", "axiom", "max_residual", "tolerance", "pass"]);
    for (k, &r) in ac.scales.iter().enumerate() {
        let s = ScaledStructure::with_scale(r)?;
        let suite = axiom_suite(s, ac.samples, seed.wrapping_add(k as u64), tol)?;
        for res in &suite.residuals {
            table.push(vec![num(r), res.axiom.name().into(), num(res.max_residual), num(tol), res.pass.to_string()]);
        }
        report.check(Check::at_most(format!("field axioms r={}", num(r)), suite.max_residual(), tol));
    }
    report.tables.push(table);

    // Analytic functions: element_of(fʳ(zʳ)) = r·f(z).
    let tol = cfg.tolerances.analytic;
    let mut rng = seeded(seed ^ 0xA5A5);
    let exp_coeffs = exp_coefficients(30);
    let mut table = Table::new("analytic", &["scale", "function", "sample", "degree", "rel_residual"]);
    for &r in &ac.scales {
        let s = ScaledStructure::with_scale(r)?;
        let mut worst_exp: f64 = 0.0;
        for i in 0..ac.exp_samples {
            let z = complex_unit_box(&mut rng) * 2.0;
            let got = element_of(s.eval_analytic(&exp_coeffs, StructureValue::new(z, s.scale()))?).canonical;
            let want = z.exp() * r;
            let res = (got - want).norm() / want.norm();
            worst_exp = worst_exp.max(res);
            table.push(vec![num(r), "exp".into(), i.to_string(), "inf".into(), num(res)]);
        }
        let mut worst_poly: f64 = 0.0;
        for i in 0..ac.polynomials {
            let degree = rng.gen_range(0..=ac.max_degree);
            let coeffs: Vec<Complex64> = (0..=degree).map(|_| complex_unit_box(&mut rng)).collect();
            let z = complex_unit_box(&mut rng);
            let got = element_of(s.eval_analytic(&coeffs, StructureValue::new(z, s.scale()))?).canonical;
            let plain: Complex64 = coeffs.iter().enumerate().map(|(k, c)| c * z.powu(k as u32)).sum();
            let want = plain * r;
            let res = if got == want { 0.0 } else { (got - want).norm() / want.norm() };
            worst_poly = worst_poly.max(res);
            table.push(vec![num(r), "polynomial".into(), i.to_string(), degree.to_string(), num(res)]);
        }
        report.check(Check::at_most(format!("analytic exp r={}", num(r)), worst_exp, tol));
        report.check(Check::at_most(format!("analytic polynomials r={}", num(r)), worst_poly, tol));
    }
    report.tables.push(table);

    // r = 1 reproduces ordinary complex arithmetic bit for bit.
    let s = ScaledStructure::reference();
    let mut mismatches = 0usize;
    for _ in 0..ac.samples {
        let u = complex_in_shell(&mut rng, 1e-3, 1e3);
        let v = complex_in_shell(&mut rng, 1e-3, 1e3);
        let (eu, ev) = (s.element(u), s.element(v));
        let pairs = [
            (s.add(eu, ev)?.canonical, u + v),
            (s.sub(eu, ev)?.canonical, u - v),
            (s.mul(eu, ev)?.canonical, u * v),
            (s.div(eu, ev)?.canonical, u / v),
            (s.conj(eu).canonical, u.conj()),
            (s.neg(eu).canonical, -u),
            (s.value_of(eu).value, u),
        ];
        mismatches += pairs
            .iter()
            .filter(|(a, b)| a.re.to_bits() != b.re.to_bits() || a.im.to_bits() != b.im.to_bits())
            .count();
    }
    report.check(Check::exact("r=1 operations equal plain arithmetic bitwise", mismatches as f64, 0.0));
    Ok(())
}

/// Random walk that stays on the lattice.
fn random_walk<R: Rng>(spec: &LatticeSpec, len: usize, rng: &mut R) -> Result<(LatticePath, Site)> {
    let start = spec.site(rng.gen_range(0..spec.num_sites()));
    let mut site = start;
    let mut steps = Vec::with_capacity(len);
    while steps.len() < len {
        let axis = rng.gen_range(0..spec.dims());
        let step = if rng.gen_bool(0.5) { Step::forward(axis) } else { Step::backward(axis) };
        if let Ok(next) = spec.neighbor(&site, step) {
            steps.push(step);
            site = next;
        }
    }
    Ok((LatticePath::new(start, steps), site))
}

fn transport(cfg: &ExperimentConfig, seed: u64, report: &mut ExperimentReport) -> Result<()> {
    let spec = cfg.transport_lattice();
    let field = RealGaugeField::generate(spec, &cfg.transport.field)?;
    let tol = cfg.tolerances.link_loop;
    let d = spec.dims();

    let mut link_mismatch = 0usize;
    let mut naive_worst: f64 = 0.0;
    for i in 0..spec.num_sites() {
        let site = spec.site(i);
        for mu in 0..d {
            let Ok(next) = spec.neighbor(&site, Step::forward(mu)) else { continue };
            let f = field.link_factor(&site, Step::forward(mu))?;
            let b = field.link_factor(&next, Step::backward(mu))?;
            if (f * b).value() != 1.0 {
                link_mismatch += 1;
            }
            naive_worst = naive_worst.max((f.value() * b.value() - 1.0).abs());
        }
    }
    report.check(Check::exact("forward x reverse link equals 1 exactly", link_mismatch as f64, 0.0));
    report.note("max_plain_float_link_product_deviation", naive_worst);

    let mut rng = seeded(seed);
    let mut reversal_mismatch = 0usize;
    let mut form_worst: f64 = 0.0;
    let mut walks = Table::new("walks", &["walk", "start", "length", "transport", "product_form", "round_trip"]);
    for w in 0..cfg.transport.walks {
        let (path, end) = random_walk(spec, cfg.transport.walk_length, &mut rng)?;
        let t = field.path_transport(&path)?.value;
        let p = field.path_transport_product(&path)?;
        form_worst = form_worst.max((t - p).abs() / t);
        let round_trip = field.path_transport(&path.then(&path.reversed(end)))?.value;
        if round_trip != 1.0 {
            reversal_mismatch += 1;
        }
        walks.push(vec![w.to_string(), site_label(&path.start, d), path.len().to_string(), num(t), num(p), num(round_trip)]);
    }
    report.check(Check::exact("path followed by its reversal equals 1 exactly", reversal_mismatch as f64, 0.0));
    report.check(Check::at_most("exp-of-sum vs product-of-links transport", form_worst, tol));

    let mut worst: f64 = 0.0;
    let mut plaq = Table::new(
        "plaquettes",
        &["corner", "mu", "nu", "curl", "loop", "loop_product", "expected", "rel_residual"],
    );
    let dx = spec.spacing();
    for q in spec.enumerate_plaquettes() {
        let curl = field.plaquette_curl(&q)?;
        let expected = (dx * dx * curl).exp();
        let lp = field.loop_transport(&q)?;
        let lprod = field.path_transport_product(&q.boundary_path())?;
        let res = (lp - expected).abs().max((lprod - expected).abs()) / expected;
        worst = worst.max(res);
        plaq.push(vec![
            site_label(&q.corner, d),
            q.mu.to_string(),
            q.nu.to_string(),
            num(curl),
            num(lp),
            num(lprod),
            num(expected),
            num(res),
        ]);
    }
    report.check(Check::at_most("plaquette loop equals exp(spacing^2 curl)", worst, tol));
    report.note("plaquettes", plaq.rows.len());
    report.tables.push(walks);
    report.tables.push(plaq);
    Ok(())
}

fn integrability(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let spec = cfg.integrability_lattice();
    let d = spec.dims();
    let field = RealGaugeField::generate(spec, &cfg.integrability.field)?;
    let tol = &cfg.tolerances;
    let sweep = field.is_integrable(tol.integrability)?;
    let (from, to) = cfg.integrability_endpoints();
    let paths = spec.staircase_paths(&from, &to, cfg.integrability.path_limit)?;
    let spread = field.transport_spread(&paths)?;

    let mut table = Table::new("paths", &["path", "steps", "exponent", "transport"]);
    for (k, p) in paths.iter().enumerate() {
        let t = field.path_transport(p)?;
        let steps: String = p.steps.iter().map(|s| char::from(b'0' + s.axis as u8)).collect();
        table.push(vec![k.to_string(), steps, num(t.exponent), num(t.value)]);
    }
    report.tables.push(table);
    let mut plaq = Table::new("plaquettes", &["corner", "mu", "nu", "curl", "loop_deviation"]);
    for q in spec.enumerate_plaquettes() {
        let dev = (field.loop_transport(&q)? - 1.0).abs();
        plaq.push(vec![site_label(&q.corner, d), q.mu.to_string(), q.nu.to_string(), num(field.plaquette_curl(&q)?), num(dev)]);
    }
    report.tables.push(plaq);

    if let Some(q) = sweep.worst_plaquette {
        report.note(
            "worst_plaquette",
            json!({
                "corner": q.corner.coords()[..d],
                "mu": q.mu,
                "nu": q.nu,
                "loop_deviation": sweep.worst_deviation,
                "curl": sweep.worst_curl,
            }),
        );
    }
    report.note("paths", paths.len());
    report.note("integrable", sweep.integrable);
    report.note("expected_nonintegrable", cfg.integrability.expected_nonintegrable);

    if cfg.integrability.expected_nonintegrable {
        report.check(Check::above("staircase transport spread", spread, tol.nonintegrable_spread));
        report.check(Check::above("max plaquette loop deviation", sweep.worst_deviation, tol.integrability));
    } else {
        report.check(Check::at_most("max plaquette loop deviation", sweep.worst_deviation, tol.integrability));
        report.check(Check::at_most("staircase transport spread", spread, tol.path_spread));
    }
    Ok(())
}

fn derivative_convergence(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dc = &cfg.derivative;
    let series = series_lattices(dc.dims, dc.box_length, &dc.deltas).map_err(Error::InvalidArgument)?;
    let mut table = Table::new("convergence", &["delta", "sites_per_axis", "max_residual"]);
    let mut points = Vec::new();
    let mut collapse_mismatch = 0usize;
    for (n, _) in series {
        let spec = LatticeSpec::new(
            &vec![n; dc.dims],
            dc.box_length / n as f64,
            scaledgauge_core::lattice::Boundary::Periodic,
        )?;
        let phi = ComplexLatticeField::fixture(&spec, &dc.fixture)?;
        let a = RealGaugeField::generate(&spec, &dc.field)?;
        let zero = RealGaugeField::zeros(&spec);
        let mut worst: f64 = 0.0;
        for axis in 0..dc.dims {
            let cov = covariant_derivative(&phi, &a, axis)?;
            let first = first_order_covariant(&phi, &a, axis)?;
            worst = worst.max(cov.max_abs_diff(&first));
            let plain = plain_derivative(&phi, axis)?;
            let flat = covariant_derivative(&phi, &zero, axis)?;
            collapse_mismatch += plain
                .values
                .iter()
                .zip(&flat.values)
                .filter(|(p, f)| p.re.to_bits() != f.re.to_bits() || p.im.to_bits() != f.im.to_bits())
                .count();
        }
        table.push(vec![num(spec.spacing()), n.to_string(), num(worst)]);
        points.push((spec.spacing(), worst));
    }
    let fit = fit_loglog(&points)?;
    report.check(Check::at_least("covariant vs first-order convergence slope", fit.slope, cfg.tolerances.min_slope));
    report.check(Check::exact("A = 0 covariant derivative equals plain derivative bitwise", collapse_mismatch as f64, 0.0));
    report.fit("covariant_minus_first_order", fit);
    report.tables.push(table);
    Ok(())
}

fn hilbert(cfg: &ExperimentConfig, seed: u64, report: &mut ExperimentReport) -> Result<()> {
    let hc = &cfg.hilbert;
    let tol = cfg.tolerances.hilbert;
    let mut rng = seeded(seed);
    let (ln_lo, ln_hi) = (hc.scale_range[0].ln(), hc.scale_range[1].ln());
    let mut table = Table::new("hilbert", &["sample", "scale", "inner_residual", "norm_residual", "unitarity"]);
    let (mut w_inner, mut w_norm, mut w_unit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut nonunitary_preserving = 0usize;
    for i in 0..hc.samples {
        let r = if ln_hi > ln_lo { rng.gen_range(ln_lo..ln_hi).exp() } else { hc.scale_range[0] };
        let v = UnitaryMatrix::random(hc.dim, &mut rng);
        let psi = HilbertVector::random(hc.dim, &mut rng);
        let phi = HilbertVector::random(hc.dim, &mut rng);
        let s = ScaledHilbertStructure::new(ScaleFactor::new(r)?, v.clone());
        let rpsi = s.vector_correspondence(&psi)?;
        let rphi = s.vector_correspondence(&phi)?;
        let (np, nf) = (psi.norm_sq().sqrt(), phi.norm_sq().sqrt());
        let want = psi.inner(&phi);
        let plain = rpsi.inner(&rphi) / (r * r);
        let via_structure = s.scaled_inner(&rpsi, &rphi)?.value;
        let inner = (plain - want).norm().max((via_structure - want).norm()) / (np * nf);
        let norm = (rpsi.norm_sq().sqrt() / r - np).abs() / np;
        let unit = unitarity_deviation(v.matrix());
        // A map that is not unitary stretches some direction.
        let mut bent = v.matrix().clone();
        bent.column_mut(0).scale_mut(1.0 + 1e-3);
        let mut basis = vec![Complex64::new(0.0, 0.0); hc.dim];
        basis[0] = Complex64::new(1.0, 0.0);
        let e0 = HilbertVector::from_slice(&basis);
        let stretched = HilbertVector(&bent * &e0.0 * Complex64::new(r, 0.0));
        if (stretched.norm_sq().sqrt() / r - 1.0).abs() <= tol {
            nonunitary_preserving += 1;
        }
        w_inner = w_inner.max(inner);
        w_norm = w_norm.max(norm);
        w_unit = w_unit.max(unit);
        table.push(vec![i.to_string(), num(r), num(inner), num(norm), num(unit)]);
    }
    report.check(Check::at_most("inner product correspondence <rVpsi, rVphi>/r^2 = <psi, phi>", w_inner, tol));
    report.check(Check::at_most("norm preservation |rVpsi|/r = |psi|", w_norm, tol));
    report.check(Check::at_most("basis map unitarity", w_unit, cfg.tolerances.unitarity));
    report.check(Check::exact("non-unitary maps that preserve norms", nonunitary_preserving as f64, 0.0));
    report.tables.push(table);
    Ok(())
}

fn bits_equal(a: &RealGaugeField, b: &RealGaugeField) -> bool {
    a.components().len() == b.components().len()
        && a.components().iter().zip(b.components()).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn max_rel_terms(ours: &[DensityTerms], reference: &[QedTerms]) -> f64 {
    ours.iter()
        .zip(reference)
        .map(|(o, q)| {
            rel_diff(o.kinetic, q.kinetic)
                .max(rel_diff(o.mass, q.mass))
                .max(rel_diff(Complex64::new(o.yang_mills, 0.0), Complex64::new(q.yang_mills, 0.0)))
                .max(rel_diff(o.total, q.total))
                .max(o.a_mass.abs())
        })
        .fold(0.0, f64::max)
}

fn gauge_abelian(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let g = &cfg.gauge;
    let tol = &cfg.tolerances;
    let series = series_lattices(2, g.box_length, &g.deltas).map_err(Error::InvalidArgument)?;
    let mut table = Table::new("covariance", &["delta", "first_order", "exponential", "global_first_order", "global_exponential"]);
    let mut points = Vec::new();
    let mut a_unchanged = true;
    let (mut worst_global, mut worst_g): (f64, f64) = (0.0, 0.0);
    let mut antisymmetric = true;
    let coarsest = g.box_length / series.iter().map(|s| s.0).min().unwrap_or(1) as f64;
    for &(n, _) in &series {
        let fx = fixtures::abelian(g, n)?;
        let dx = fx.psi.spec().spacing();
        let local = abelian_covariance_residual(&fx.psi, &fx.cfg, &fx.local)?;
        let global = abelian_covariance_residual(&fx.psi, &fx.cfg, &fx.global)?;
        // Rounding in Λψ(x+μ̂) − Λψ(x) is amplified by 1/Δ, so the bound
        // applies at the coarsest spacing; the full series goes to the table.
        if dx >= coarsest {
            worst_global = global.first_order.max(global.exponential);
        }
        let (_, cfg_t) = gauge_transform_abelian(&fx.psi, &fx.cfg, &fx.local)?;
        a_unchanged &= bits_equal(&cfg_t.a, &fx.cfg.a);
        let g0 = field_strength(&fx.cfg.gamma)?;
        let g1 = field_strength(&cfg_t.gamma)?;
        worst_g = worst_g.max(g0.max_abs_diff(&g1));
        for x in 0..g0.num_sites() {
            for mu in 0..2 {
                for nu in 0..2 {
                    antisymmetric &= g0.get(x, mu, nu) == -g0.get(x, nu, mu);
                }
            }
        }
        table.push(vec![num(dx), num(local.first_order), num(local.exponential), num(global.first_order), num(global.exponential)]);
        points.push(CovariancePoint { delta: dx, first_order: local.first_order, exponential: local.exponential });
    }
    let study = CovarianceStudy::from_points(points);
    report.check(Check::flag("A' = A bitwise", a_unchanged));
    report.check(Check::at_most("exponential link covariance residual", study.max_exponential, tol.covariance_exact));
    let slope = study.first_order_fit.as_ref().map_or(f64::NAN, |f| f.slope);
    report.check(Check::at_least("first-order covariance slope", slope, tol.min_slope));
    report.check(Check::at_most("global phase covariance residual at the coarsest spacing", worst_global, tol.global_covariance));
    report.check(Check::at_most("field strength gauge invariance", worst_g, tol.field_strength));
    report.check(Check::flag("field strength antisymmetric", antisymmetric));
    if let Some(fit) = study.first_order_fit {
        report.fit("first_order_covariance", fit);
    }
    report.tables.push(table);

    // With A ≡ 0 the construction reduces to ordinary lattice QED.
    let mut collapse = Table::new("collapse", &["quantity", "mode", "max_rel_diff"]);
    let n = series[0].0;
    let fx = fixtures::abelian(g, n)?;
    let spec = fx.psi.spec().clone();
    let flat = AbelianConfig { a: RealGaugeField::zeros(&spec), ..fx.cfg.clone() };
    let gamma = flat.gamma.components();
    let k = std::f64::consts::TAU / g.box_length;
    let spinor = MultipletField::from_fn(&spec, 4, |x, c| {
        Complex64::from_polar(1.0 + 0.1 * c as f64, k * x[0] + 0.5 * c as f64) + Complex64::new(0.0, 0.2 * (k * x[1]).sin())
    })?;
    let mut worst: f64 = 0.0;
    for (mode, how, label) in [
        (DerivativeMode::Exponential, QedDerivative::Link, "exponential"),
        (DerivativeMode::FirstOrder, QedDerivative::Expanded, "first_order"),
    ] {
        let mut dmax: f64 = 0.0;
        for axis in 0..2 {
            let ours = abelian_cov_derivative(&fx.psi, &flat, axis, mode)?;
            let theirs = u1_derivative(&spec, 1, fx.psi.values(), gamma, flat.g_i, axis, how);
            dmax = ours.values().iter().zip(&theirs).map(|(a, b)| rel_diff(*a, *b)).fold(dmax, f64::max);
        }
        collapse.push(vec!["covariant_derivative".into(), label.into(), num(dmax)]);
        let kg = lagrangian_density(&fx.psi, &flat, DensityKind::KleinGordon, mode)?;
        let kg_ref = scalar_qed(&spec, 1, fx.psi.values(), gamma, flat.g_i, flat.mass, how);
        let kg_diff = max_rel_terms(&kg, &kg_ref);
        collapse.push(vec!["klein_gordon_density".into(), label.into(), num(kg_diff)]);
        let dirac = lagrangian_density(&spinor, &flat, DensityKind::Dirac, mode)?;
        let dirac_ref = spinor_qed(&spec, spinor.values(), gamma, flat.g_i, flat.mass, how);
        let dirac_diff = max_rel_terms(&dirac, &dirac_ref);
        collapse.push(vec!["dirac_density".into(), label.into(), num(dirac_diff)]);
        worst = worst.max(dmax).max(kg_diff).max(dirac_diff);
    }
    report.check(Check::at_most("A = 0 derivatives and densities match lattice QED", worst, tol.collapse));
    report.tables.push(collapse);
    Ok(())
}

fn max_entry(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn series_exp(m: &Mat2, order: usize) -> Mat2 {
    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for k in 1..=order {
        term = term * m / Complex64::new(k as f64, 0.0);
        sum += term;
    }
    sum
}

fn gauge_su2(cfg: &ExperimentConfig, seed: u64, report: &mut ExperimentReport) -> Result<()> {
    let g = &cfg.gauge;
    let tol = &cfg.tolerances;
    let mut rng = seeded(seed);

    // Random links: unitarity, unit determinant, closed form vs series.
    let side = ((g.random_links as f64 / 2.0).sqrt().ceil() as usize).max(2);
    let spec = fixtures::square(g, side)?;
    let mut draw = || rng.gen_range(-2.0..2.0);
    let a = RealGaugeField::from_fn(&spec, |_, _| draw())?;
    let gamma = RealGaugeField::from_fn(&spec, |_, _| draw())?;
    let base = AbelianConfig::new(a, gamma, g.g_r, g.g_i, g.mass, g.lambda)?;
    let random = SU2Config::from_fn(base, g.g, |_, _| [draw(), draw(), draw()])?;
    let (mut w_unit, mut w_det, mut w_series): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let k = 2.0 * g.g * spec.spacing();
    for i in 0..spec.num_sites() {
        for mu in 0..2 {
            let u = su2_link(&random, i, mu, false);
            w_unit = w_unit.max(max_entry(&(u.adjoint() * u - Mat2::identity())));
            let om = random.omega(i, mu);
            let su = su2_exp(&[k * om[0], k * om[1], k * om[2]]);
            w_det = w_det.max((su.determinant() - Complex64::new(1.0, 0.0)).norm());
        }
    }
    for _ in 0..g.random_links {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let gen = dot_tau(&v) * Complex64::new(0.0, -0.5);
        w_series = w_series.max(max_entry(&(su2_exp(&v) - series_exp(&gen, 12))));
    }
    report.check(Check::at_most("link unitarity", w_unit, tol.unitarity));
    report.check(Check::at_most("SU(2) factor determinant", w_det, tol.unitarity));
    report.check(Check::at_most("closed-form exponential vs 12th-order series", w_series, tol.series));

    let taus = pauli();
    let half = Complex64::new(0.5, 0.0);
    let mut pauli_exact = true;
    for j in 0..3 {
        for kk in 0..3 {
            let (x, y) = (taus[j] * half, taus[kk] * half);
            let mut rhs = Mat2::zeros();
            for (l, t) in taus.iter().enumerate() {
                rhs += t * Complex64::new(0.0, 0.5 * structure_constant(j, kk, l));
            }
            pauli_exact &= x * y - y * x == rhs;
        }
    }
    report.check(Check::flag("Pauli commutation exact", pauli_exact));

    let series = series_lattices(2, g.box_length, &g.deltas).map_err(Error::InvalidArgument)?;
    let mut table = Table::new(
        "su2_covariance",
        &["delta", "first_order", "link_level", "identity_component", "gamma_discrepancy"],
    );
    let mut points = Vec::new();
    let mut a_unchanged = true;
    let mut reduces = true;
    let mut w_rot: f64 = 0.0;
    for &(n, _) in &series {
        let fx = fixtures::su2(g, n)?;
        let dx = fx.psi.spec().spacing();
        let r = su2_covariance_residual(&fx.psi, &fx.cfg, &fx.local)?;
        let tr = gauge_transform_su2(&fx.psi, &fx.cfg, &fx.local, tol.identity_component)?;
        a_unchanged &= bits_equal(&tr.cfg.base.a, &fx.cfg.base.a);

        let rot = gauge_transform_su2(&fx.psi, &fx.cfg, &fx.global, tol.identity_component)?;
        for (before, after) in fx.cfg.omega.iter().zip(&rot.cfg.omega) {
            let n0 = before.iter().map(|v| v * v).sum::<f64>().sqrt();
            let n1 = after.iter().map(|v| v * v).sum::<f64>().sqrt();
            w_rot = w_rot.max((n0 - n1).abs());
        }

        let abelian_only = GaugeTransformation { theta: vec![[0.0; 3]; fx.local.phase.len()], ..fx.local.clone() };
        let t0 = gauge_transform_su2(&fx.psi, &fx.cfg, &abelian_only, tol.identity_component)?;
        let (psi_ab, cfg_ab) = gauge_transform_abelian(&fx.psi, &fx.cfg.base, &abelian_only)?;
        reduces &= t0.psi == psi_ab && t0.cfg.base.gamma == cfg_ab.gamma && t0.cfg.omega == fx.cfg.omega;

        table.push(vec![
            num(dx),
            num(r.first_order),
            num(r.link_level),
            num(r.max_identity_component),
            num(r.max_gamma_discrepancy),
        ]);
        points.push(CovariancePoint { delta: dx, first_order: r.first_order, exponential: r.link_level });
        report.note(&format!("identity_component_exceeds_tol_n{n}"), tr.identity_exceeds_tol);
    }
    let study = CovarianceStudy::from_points(points);
    report.check(Check::flag("A' = A bitwise", a_unchanged));
    report.check(Check::flag("Theta = 0 reduces to the abelian transformation", reduces));
    report.check(Check::at_most("global Theta preserves |Omega| per site", w_rot, tol.unitarity));
    let slope = study.first_order_fit.as_ref().map_or(f64::NAN, |f| f.slope);
    report.check(Check::at_least("first-order covariance slope", slope, tol.min_slope));
    report.check(Check::at_most("link-level covariance residual", study.max_exponential, tol.covariance_exact));
    if let Some(fit) = study.first_order_fit {
        report.fit("first_order_covariance", fit);
    }
    report.tables.push(table);
    Ok(())
}

fn action(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let ac = &cfg.action;
    let g = &cfg.gauge;
    let spec = cfg.action_lattice();
    let d = spec.dims();
    let a = RealGaugeField::generate(spec, &ac.field)?;
    let gamma = RealGaugeField::generate(spec, &ac.gamma)?;
    let theory = AbelianConfig::new(a, gamma, g.g_r, g.g_i, g.mass, g.lambda)?;
    let kvec: Vec<f64> = (0..d).map(|mu| std::f64::consts::TAU * ac.modes[mu] / spec.length(mu)).collect();
    let wave = |x: &[f64]| -> f64 { (0..d).map(|mu| kvec[mu] * x[mu]).sum() };
    let psi = match ac.kind {
        DensityKind::KleinGordon => MultipletField::from_fn(spec, 1, |x, _| Complex64::from_polar(1.0, wave(x)))?,
        DensityKind::Dirac => MultipletField::from_fn(spec, 4, |x, c| {
            Complex64::from_polar(1.0 / (1.0 + c as f64), wave(x) + 0.3 * c as f64)
        })?,
    };
    let density = lagrangian_density(&psi, &theory, ac.kind, ac.mode)?;
    let mut table = Table::new(
        "densities",
        &["site", "kinetic_re", "kinetic_im", "mass_re", "mass_im", "a_mass", "yang_mills", "total_re", "total_im"],
    );
    for (i, t) in density.iter().enumerate() {
        table.push(vec![
            site_label(&spec.site(i), d),
            num(t.kinetic.re),
            num(t.kinetic.im),
            num(t.mass.re),
            num(t.mass.im),
            num(t.a_mass),
            num(t.yang_mills),
            num(t.total.re),
            num(t.total.im),
        ]);
    }
    report.tables.push(table);

    // The A-mass term sees only A, which no gauge transformation touches.
    let t = GaugeTransformation::from_fn(spec, |x| (0.5 * wave(x).sin(), [0.0; 3]))?;
    let (psi_t, theory_t) = gauge_transform_abelian(&psi, &theory, &t)?;
    let density_t = lagrangian_density(&psi_t, &theory_t, ac.kind, ac.mode)?;
    let invariant = density.iter().zip(&density_t).all(|(x, y)| x.a_mass.to_bits() == y.a_mass.to_bits());
    report.check(Check::flag("A-mass term gauge invariant bitwise", invariant));

    let phi = ComplexLatticeField::from_values(spec, density.iter().map(|t| t.total).collect())?;
    match anchor_dependence_report(&phi, &theory.a, &cfg.action_anchors()) {
        Ok(anchors) => {
            let mut table = Table::new(
                "anchors",
                &["from", "to", "ratio_re", "ratio_im", "expected", "deviation"],
            );
            for p in &anchors.pairs {
                table.push(vec![
                    site_label(&Site::new(&p.from[..d]), d),
                    site_label(&Site::new(&p.to[..d]), d),
                    num(p.ratio.re),
                    num(p.ratio.im),
                    num(p.expected),
                    num(p.deviation),
                ]);
            }
            report.tables.push(table);
            let actions: Vec<_> = anchors
                .integrals
                .iter()
                .map(|(x, v)| json!({"anchor": x[..d], "re": v.re, "im": v.im}))
                .collect();
            report.note("actions", actions);
            report.check(Check::at_most("anchor covariance of the transported action", anchors.max_deviation(), cfg.tolerances.anchor));
        }
        Err(Error::NotIntegrable { deviation, tolerance }) => {
            report.note("not_integrable", json!({"deviation": deviation, "tolerance": tolerance}));
            report.check(Check::at_most("action field integrable", deviation, tolerance));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}
