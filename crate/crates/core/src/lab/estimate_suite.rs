use super::config::Resolved;
use super::experiments::{AdmissibilityOptions, DispersiveOptions, StrichartzExperimentOptions};
use super::output::{Check, Outcome, Table};
use crate::error::Result;
use crate::estimates::{
    admissible_q, dispersive_fit, envelope_kernel, interpolated_decay_fit, schur_admissibility, smoothing_decay_fit, strichartz_norm,
    tail_kernel_envelope_check, DecayFit, SchurReport, SchurVerdict, StrichartzOptions,
};
use crate::free::SpectralParams;
use crate::perturbed::Potential;

fn each_case(out: &mut Outcome, cases: &[SpectralParams], mut f: impl FnMut(&mut Outcome, &SpectralParams, &str)) {
    for p in cases {
        let tag = format!("n{}_a{}", p.n, p.alpha);
        f(out, p, &tag);
    }
}

fn decay_leg(out: &mut Outcome, p: &SpectralParams, name: &str, claim: &str, tol: f64, r: Result<DecayFit>) {
    match r {
        Ok(f) => {
            let mut t = Table::new(format!("decay_{}", name.replace('/', "_")), &["t", "value", "monitor"]);
            for i in 0..f.series.t.len() {
                t.push(vec![f.series.t[i], f.series.value[i], f.series.monitor[i]]);
            }
            out.tables.push(t);
            out.fit(name, claim, p.n, p.alpha, f.claim, &f.fit, tol);
        }
        Err(e) => out.checks.push(Check::errored(name, claim, &e)),
    }
}

pub(super) fn dispersive(out: &mut Outcome, res: &Resolved, o: &DispersiveOptions, cases: &[SpectralParams]) {
    each_case(out, cases, |out, p, tag| {
        let free = Potential::zero();
        let pot = &res.potential;
        let d = &o.decay;
        decay_leg(out, p, &format!("{tag}/free"), "sup|e^(-itH0) f| ~ t^(-n/(2 alpha))", o.free_tol, dispersive_fit(p, &free, &o.data, d));
        if !pot.is_zero() {
            decay_leg(out, p, &format!("{tag}/perturbed"), "sup|e^(-itH) P_ac f| ~ t^(-n/(2 alpha))", o.perturbed_tol, dispersive_fit(p, pot, &o.data, d));
        }
        let pe = o.interpolation_exponent;
        decay_leg(
            out,
            p,
            &format!("{tag}/interpolated_p{pe:.4}"),
            "||e^(-itH) P_ac||_(p->p') ~ t^(n/alpha (1/2 - 1/p))",
            o.interpolation_tol,
            interpolated_decay_fit(p, pot, pe, &o.interpolation_data, d),
        );
        decay_leg(
            out,
            p,
            &format!("{tag}/smoothing_g{}", o.gamma),
            "sup|e^(-itH0) H0^((gamma-n)/(2 alpha)) f| ~ t^(-gamma/(2 alpha))",
            o.smoothing_tol,
            smoothing_decay_fit(p, &free, o.gamma, &o.data, d),
        );
    });
}

pub(super) fn strichartz(out: &mut Outcome, res: &Resolved, o: &StrichartzExperimentOptions, cases: &[SpectralParams]) {
    each_case(out, cases, |out, p, tag| {
        let q = match admissible_q(p, o.r) {
            Ok(q) => q,
            Err(e) => return out.checks.push(Check::errored(format!("{tag}/pair"), "admissible pair", &e)),
        };
        let fine = StrichartzOptions { panels_per_decade: 2 * o.time.panels_per_decade, ..o.time };
        let mut t = Table::new(format!("strichartz_{tag}"), &["datum", "data_l2", "mixed", "constant", "constant_fine", "t_cut", "tail_share"]);
        let mut consts = vec![];
        for (k, d) in o.data.iter().enumerate() {
            let name = format!("{tag}/d{k}");
            let a = strichartz_norm(p, &res.potential, q, o.r, d, &o.time);
            let b = strichartz_norm(p, &res.potential, q, o.r, d, &fine);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    t.push(vec![k as f64, a.data_l2, a.mixed, a.constant, b.constant, a.t_cut, a.tail_share]);
                    out.checks.push(Check::holds(
                        format!("{name}/bounded"),
                        format!("||u||_(L^{q:.4} L^{}) = {:.6e} <= C ||f||_2 with C = {:.6e} ({d:?})", o.r, a.mixed, a.constant),
                        a.constant.is_finite() && a.constant > 0.0,
                    ));
                    out.checks.push(Check::at_most(
                        format!("{name}/doubling"),
                        "C stable under time-grid doubling",
                        (a.constant / b.constant - 1.0).abs(),
                        o.doubling_tol,
                    ));
                    consts.push(a.constant);
                }
                (Err(e), _) | (_, Err(e)) => out.checks.push(Check::errored(format!("{name}/bounded"), "mixed norm computed", &e)),
            }
        }
        if consts.len() == o.data.len() && consts.len() > 1 {
            let hi = consts.iter().cloned().fold(0.0, f64::max);
            let lo = consts.iter().cloned().fold(f64::INFINITY, f64::min);
            out.checks.push(Check::at_most(format!("{tag}/spread"), "C spread over distinct initial data", hi / lo, o.spread_bound));
        }
        out.tables.push(t);
    });
}

fn schur_row(t: &mut Table, label: f64, n: usize, r: &SchurReport) {
    let v = match r.verdict {
        SchurVerdict::Admissible => 1.0,
        SchurVerdict::Borderline => 0.0,
        SchurVerdict::Divergent => -1.0,
    };
    t.push(vec![label, n as f64, r.row.sup, r.col.sup, r.row.shell_exponent.min(r.col.shell_exponent), v]);
}

pub(super) fn admissibility(out: &mut Outcome, o: &AdmissibilityOptions, cases: &[SpectralParams]) {
    each_case(out, cases, |out, p, tag| {
        let cols = ["eps", "n", "row_sup", "col_sup", "shell_exponent", "verdict"];
        let mut t = Table::new(format!("schur_{tag}"), &cols);
        let want = [(SchurVerdict::Admissible, &o.admissible_eps), (SchurVerdict::Borderline, &o.borderline_eps)];
        for (verdict, list) in want {
            for &eps in list.iter() {
                let name = format!("{tag}/eps{eps}");
                match schur_admissibility(p.n, envelope_kernel(p.n, eps), &o.schur) {
                    Ok(r) => {
                        schur_row(&mut t, eps, p.n, &r);
                        let claim = format!("envelope with eps = {eps} is {verdict:?} (got {:?}, shell exponent {:.4})", r.verdict, r.row.shell_exponent.min(r.col.shell_exponent));
                        out.checks.push(Check::holds(name, claim.to_lowercase(), r.verdict == verdict));
                    }
                    Err(e) => out.checks.push(Check::errored(name, "Schur integrals computed", &e)),
                }
            }
        }
        for &n in &o.tail_dims {
            let name = format!("{tag}/tail_envelope_n{n}");
            match tail_kernel_envelope_check(n, &o.schur) {
                Ok(r) => {
                    schur_row(&mut t, 1.0, n, &r);
                    let claim = format!("tail envelope in dimension {n} is admissible (got {:?})", r.verdict);
                    out.checks.push(Check::holds(name, claim.to_lowercase(), r.verdict == SchurVerdict::Admissible));
                }
                Err(e) => out.checks.push(Check::errored(name, "Schur integrals computed", &e)),
            }
        }
        out.tables.push(t);
    });
}
