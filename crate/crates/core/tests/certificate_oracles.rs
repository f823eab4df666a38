//! Every certificate constant re-evaluated along a second arithmetic path.

use std::f64::consts::PI;

use crd_core::certificates::{cert2_build, cert3_build, Cert2Inputs, Cert3Inputs};
use crd_core::network::TwoSpeciesExponents;

const REL: f64 = 1e-14;

fn close(name: &str, got: f64, want: f64) {
    let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    assert!(err <= REL, "{name}: {got} vs {want} (rel {err:e})");
}

/// `Psi(x, y) / (sqrt x - sqrt y)^2` from the plain definition.
fn ratio(x: f64, y: f64) -> f64 {
    (x * (x / y).ln() - x + y) / (x.sqrt() - y.sqrt()).powi(2)
}

/// Linear scan of `10^{j/20}` from far below.
fn k_pick(threshold: f64) -> f64 {
    (-400..).map(|j| 10f64.powf(j as f64 / 20.0)).find(|k| *k > threshold).unwrap()
}

fn cert3_inputs(m1: f64, m2: f64, d: [f64; 3], beta: f64, k_bound: f64) -> Cert3Inputs {
    Cert3Inputs {
        m1,
        m2,
        diffusions: d,
        e0_abs: 1.7,
        e0_rel: 0.4,
        beta,
        k_bound,
        eps_sq: 0.2,
        c_lsi: PI * PI,
        c_p: PI * PI,
        l: None,
        scan_size: 400,
    }
}

#[test]
fn cert3_constants_recomputed() {
    for (m1, m2, d, beta, kb) in [
        (2.0, 2.0, [1.0, 1.0, 1.0], 1.0, 2.0),
        (1.5, 2.5, [1.0, 2.0, 0.5], 2.0, 3.0),
        (4.0, 0.7, [0.3, 1.0, 2.0], 0.5, 5.0),
    ] {
        let i = cert3_inputs(m1, m2, d, beta, kb);
        let c = cert3_build(&i).unwrap();
        let [a, b, cc] = [c.eq.values[0], c.eq.values[1], c.eq.values[2]];
        let dmin = d[0].min(d[1]).min(d[2]);

        close("C1", c.c1, (i.e0_abs + 3.0) / 4.0 / dmin);
        close("C2", c.c2, PI * PI * dmin);
        let c3 = [beta * c.c2, a * b * b, b * cc].into_iter().fold(f64::INFINITY, f64::min);
        close("C3", c.c3_coeff, c3);
        close("C5", c.c5, c3 * if c.c4 < 1.0 { c.c4 } else { 1.0 });
        let c7 = [4.0 * d[0], 4.0 * d[1], 4.0 * d[2], a * b * b + b * cc].into_iter().fold(f64::INFINITY, f64::min);
        close("C7", c.c7, c7);
        let m = if m1 > m2 { m1 } else { m2 };
        let c8 = [ratio(m, a), ratio(m, b), ratio(m, cc)].into_iter().fold(0.0, f64::max);
        assert!((c.c8 - c8).abs() <= 1e-14 * c8, "C8 {} vs {c8}", c.c8);

        let l = c.l;
        let r1 = (m2.sqrt() + l) * (m2.sqrt() + l) + 2.0 * (m1 * m2).sqrt() + l * m1.sqrt();
        let r2 = 2.0 * m2.sqrt() + l;
        close("R1", c.r1, r1);
        close("R2", c.r2, r2);
        let r = 4.0 * (r1 * r1 / (a * b * b) + r2 * r2 / (b * cc));
        close("R", c.r, r);
        let rt = PI * PI * l * l / ((m1 * m2 * m2 / (a * b * b)).sqrt() + m2 / (b * cc).sqrt()).powi(2);
        close("R~", c.r_tilde, rt);
        let k = k_pick((r + 1.0) / 1.0);
        close("K", c.k, k);
        let ckr = if k * rt < 0.5 { k * rt } else { 0.5 };
        close("C_KR", c.c_kr, ckr);
        close("C9", c.c9, ckr / 3.0 / k);

        let mu_k = (kb / [a, b, cc].into_iter().fold(f64::INFINITY, f64::min)).sqrt() - 1.0;
        close("mu_k", c.mu_k, mu_k);
        let q = 4.0 * (1.0 + mu_k) * (1.0 + mu_k);
        let c11 = [(4.0 * kb * kb + q) / a / b, q / b / b, q / b / cc].into_iter().fold(0.0, f64::max);
        close("C11", c.c11, c11);
        let c12 = PI * PI * 0.04 / (2.0 * b * kb * c11);
        close("C12", c.c12, c12);
        let c10 = c12 / [a, b, cc].into_iter().fold(0.0, f64::max);
        close("C10", c.c10, c10);
        let c13 = c7 * c.c9 * c10 / c.c8;
        close("C13", c.c13, if c13 < c.c2 { c13 } else { c.c2 });
        close("exponent", c.envelope.algebraic_exponent, c.c5 / kb);

        for (name, v) in c.labeled() {
            assert!(v.is_finite() && v >= 0.0, "{name} = {v}");
        }
    }
}

#[test]
fn cert2_constants_recomputed() {
    let exps = TwoSpeciesExponents::new(2, 1, 1, 3).unwrap();
    for (alpha, beta, total, d) in
        [(0.8, 1.25, 3.0, [1.0, 1.0]), (0.5, 2.0, 4.0, [0.5, 2.0]), (1.0, 1.0, 3.0, [1.0, 3.0])]
    {
        let i = Cert2Inputs { alpha, beta, exps, total, diffusions: d, c_lsi: PI * PI, c_p: PI * PI, l: None };
        let c = cert2_build(&i).unwrap();
        let (a, b) = (c.eq.values[0], c.eq.values[1]);
        // m_bar = 1, n_bar = 2
        let la = f64::max(2.0, 2.0 / alpha.powi(4));
        let lb = 9.0 * f64::max(1.0, 1.0 / alpha);
        close("L_a", c.l_a, la);
        close("L_b", c.l_b, lb);
        close("eps^2", c.eps_sq, 1.0 / f64::max(la, lb));
        let om = f64::max(f64::max(2.0, 2.0 * beta * beta), 5.0 * f64::max(1.0, beta));
        close("omega", c.omega, om);
        close("N", c.n, total);
        close("D1", c.d1, PI * PI * d[0].min(d[1]));
        let w1 = a * a * b;
        let w2 = a * b * b * b;
        close("D2", c.d2, f64::min(4.0 * d[0].min(d[1]), w1 + w2));
        close("D3", c.d3, f64::max(ratio(total, a), ratio(total, b)));

        let l = c.l;
        let sn = total.sqrt();
        // x^2 y has gradient bound 2 (sqrt N + L)^2; x y^3 has 3 (sqrt N + L)^3
        let r1 = 2.0 * (sn + l).powi(2);
        let r2 = 3.0 * (sn + l).powi(3);
        close("R1", c.r1, r1);
        close("R2", c.r2, r2);
        let r = 4.0 * r1 * r1 / w1 + 4.0 * r2 * r2 / w2;
        close("R", c.r, r);
        let den = total.powf(1.5) / w1.sqrt() + total * total / w2;
        close("R~", c.r_tilde, PI * PI * l * l / den / den);
        let k = k_pick(r + 1.0);
        close("K", c.k, k);
        let ckr = f64::min(k * c.r_tilde, 0.5);
        close("D4", c.d4, ckr / (3.0 * k));

        let eps = c.eps_sq.sqrt();
        close("mu_eps", c.mu_eps, eps / a.sqrt().max(b.sqrt()) - 1.0);
        close("mu_omega", c.mu_omega, om.sqrt() / a.sqrt().min(b.sqrt()) - 1.0);
        // closed form of the binomial tail: ((x + v s)^p - x^p) / s
        let x = (1.0 + c.mu_eps).abs().max((1.0 + c.mu_omega).abs());
        let s = om.sqrt();
        let tail = |p: i32, v: f64| ((x + v * s).powi(p) - x.powi(p)) / s;
        let sb = f64::max(tail(1, s / (eps * a.sqrt())), tail(2, s / (eps * b.sqrt())));
        assert!((c.s_bound - sb).abs() <= 1e-14 * sb, "S {} vs {sb}", c.s_bound);

        // m2 + n1 = 2
        let pref = c.eps_sq * c.eps_sq / (a * b);
        close("D6", c.d6, 4.0 * pref * c.s_bound);
        close("D7", c.d7, PI * PI * pref / (2.0 * c.d6));
        close("D5", c.d5, c.d7 / a.max(b));
        close("D8", c.d8, f64::min(c.d2 * c.d4 * c.d5 / c.d3, c.d1));
        for (name, v) in c.labeled() {
            assert!(v.is_finite(), "{name} = {v}");
        }
    }
}
