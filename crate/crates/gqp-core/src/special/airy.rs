//! Airy functions Ai, Bi and their derivatives on the window |x| ≤ 15.
//!
//! Strategy: a double-double Maclaurin series on x ∈ [−15, 8] and the
//! exponential asymptotic expansions on x ∈ (8, 15]. The split point is
//! where the optimally truncated asymptotic error e^{−2ξ} (ξ = ⅔x^{3/2})
//! drops below ~1e−13 relative, so both branches deliver near-machine
//! accuracy everywhere — a hard requirement for the finite-difference ODE
//! and PDE residual checks downstream, which amplify value noise by h⁻².
//! The window cap keeps that claim honest.

use crate::error::{Error, Result};
use crate::special::dd::Dd;
use crate::special::SeriesControl;

/// Ai(0) = 3^{−2/3}/Γ(2/3) and friends, stored as double-doubles.
const AI0: Dd = Dd { hi: 0.3550280538878172, lo: 2.05233632436212e-17 };
const AIP0: Dd = Dd { hi: -0.2588194037928068, lo: 2.522243111610832e-17 };
const BI0: Dd = Dd { hi: 0.6149266274460007, lo: 5.0899207794891416e-17 };
const BIP0: Dd = Dd { hi: 0.4482883573538264, lo: -2.5363237774417305e-17 };

/// Largest argument magnitude the implementation accepts.
pub const AIRY_WINDOW: f64 = 15.0;
/// Where the evaluation switches from the Maclaurin series to asymptotics.
const SERIES_SPLIT: f64 = 8.0;

/// All four Airy values at one argument (the series work is shared).
#[derive(Debug, Clone, Copy)]
pub struct AiryValues {
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
}

/// The two Maclaurin solutions f, g of y″ = xy (f(0)=1, f′(0)=0; g(0)=0,
/// g′(0)=1) and their derivatives, summed in double-double arithmetic.
///
/// `control.abs_tol` bounds the admissible truncation remainder if the term
/// budget runs out early; the loop itself always runs to full double-double
/// convergence (terms below 1e−33 of the running peak), so the default
/// control never degrades accuracy.
fn maclaurin(x: f64, control: &SeriesControl) -> Result<(Dd, Dd, Dd, Dd)> {
    let x3 = Dd::prod(x, x).mul_f64(x);
    let mut term_f = Dd::ONE;
    let mut term_g = Dd::from_f64(x);
    let mut term_gp = Dd::ONE;
    // f′ has no k=0 term; its k=1 value x²/2 is pre-seeded and first added
    // inside the loop, so the accumulator starts at zero.
    let mut term_fp = Dd::prod(x, x).div_f64(2.0);
    let mut f = term_f;
    let mut g = term_g;
    let mut gp = term_gp;
    let mut fp = Dd::ZERO;
    let mut peak: f64 = 1.0;
    for k in 1..=control.max_terms {
        let kf = k as f64;
        term_f = term_f.mul(x3).div_f64((3.0 * kf - 1.0) * 3.0 * kf);
        term_g = term_g.mul(x3).div_f64(3.0 * kf * (3.0 * kf + 1.0));
        term_gp = term_gp.mul(x3).div_f64((3.0 * kf - 2.0) * 3.0 * kf);
        if k > 1 {
            term_fp = term_fp
                .mul(x3)
                .mul_f64(kf)
                .div_f64((kf - 1.0) * (3.0 * kf - 1.0) * 3.0 * kf);
        }
        f = f.add(term_f);
        g = g.add(term_g);
        gp = gp.add(term_gp);
        fp = fp.add(term_fp);
        let biggest = term_f
            .abs_hi()
            .max(term_g.abs_hi())
            .max(term_gp.abs_hi())
            .max(term_fp.abs_hi());
        peak = peak.max(biggest);
        if biggest < 1e-33 * peak {
            return Ok((f, g, fp, gp));
        }
        if k == control.max_terms && biggest > control.abs_tol {
            return Err(Error::SeriesLimit(format!(
                "Airy Maclaurin series at x={x} not converged after {k} terms \
                 (last term {biggest:e} > abs_tol {:e})",
                control.abs_tol
            )));
        }
    }
    Ok((f, g, fp, gp))
}

/// Asymptotic expansions for x > SERIES_SPLIT (DLMF 9.7 coefficient
/// recurrences). Terms are summed until they stop decreasing, well past the
/// point where they reach ~e^{−2ξ} relative — below 1e−13 for x ≥ 8.
fn asymptotic(x: f64) -> AiryValues {
    let xi = 2.0 / 3.0 * x.powf(1.5);
    let mut u = 1.0f64;
    let (mut s_ai, mut s_bi, mut s_aip, mut s_bip) = (1.0f64, 1.0f64, 1.0f64, 1.0f64);
    let mut prev = 1.0f64;
    let mut sign = 1.0f64;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / (216.0 * kf * (2.0 * kf - 1.0));
        let v = -u * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        let t = u / xi.powi(k as i32);
        if t.abs() >= prev {
            break;
        }
        prev = t.abs();
        sign = -sign;
        s_ai += sign * t;
        s_bi += t;
        let tv = v / xi.powi(k as i32);
        s_aip += sign * tv;
        s_bip += tv;
    }
    let root = x.powf(0.25);
    let spi = std::f64::consts::PI.sqrt();
    let (em, ep) = ((-xi).exp(), xi.exp());
    AiryValues {
        ai: em * s_ai / (2.0 * spi * root),
        ai_prime: -root * em * s_aip / (2.0 * spi),
        bi: ep * s_bi / (spi * root),
        bi_prime: root * ep * s_bip / spi,
    }
}

/// Evaluate Ai, Ai′, Bi, Bi′ at once with an explicit series control.
pub fn airy_all_with(x: f64, control: &SeriesControl) -> Result<AiryValues> {
    control.validate()?;
    if !x.is_finite() || x.abs() > AIRY_WINDOW {
        return Err(Error::Domain(format!(
            "Airy argument {x} outside the supported window |x| <= {AIRY_WINDOW}"
        )));
    }
    if x > SERIES_SPLIT {
        return Ok(asymptotic(x));
    }
    let (f, g, fp, gp) = maclaurin(x, control)?;
    Ok(AiryValues {
        ai: AI0.mul(f).add(AIP0.mul(g)).to_f64(),
        ai_prime: AI0.mul(fp).add(AIP0.mul(gp)).to_f64(),
        bi: BI0.mul(f).add(BIP0.mul(g)).to_f64(),
        bi_prime: BI0.mul(fp).add(BIP0.mul(gp)).to_f64(),
    })
}

pub fn airy_all(x: f64) -> Result<AiryValues> {
    airy_all_with(x, &SeriesControl::default())
}

pub fn airy_ai(x: f64) -> Result<f64> {
    Ok(airy_all(x)?.ai)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    Ok(airy_all(x)?.ai_prime)
}

pub fn airy_bi(x: f64) -> Result<f64> {
    Ok(airy_all(x)?.bi)
}

pub fn airy_bi_prime(x: f64) -> Result<f64> {
    Ok(airy_all(x)?.bi_prime)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Frozen reference values from a 40-digit arbitrary-precision oracle.
    /// Columns: x, Ai, Bi, Ai′, Bi′.
    const REFERENCE: [(f64, f64, f64, f64, f64); 12] = [
        (-14.5, -0.030597418939551424, 0.2874922435175278, -1.0953212728805393, -0.11156222286703331),
        (-10.0, 0.04024123848644319, -0.3146798296438386, 0.99626504413279, 0.11941411339990923),
        (-5.0, 0.35076100902411433, -0.13836913490160058, 0.32719281855444315, 0.7784117730018992),
        (-1.0, 0.5355608832923521, 0.1039973894969446, -0.01016056711664521, 0.5923756264227924),
        (0.5, 0.23169360648083348, 0.8542770431031554, -0.2249105326646839, 0.5445725641405923),
        (2.0, 0.03492413042327438, 3.2980949999782148, -0.05309038443365363, 4.10068204993289),
        (5.0, 0.00010834442813607442, 657.7920441711711, -0.0002474138908684625, 1435.8190802179824),
        (7.5, 1.9172560675134309e-07, 303229.6151125334, -5.312713959720545e-07, 819987.8353587997),
        (8.0, 4.6922076160992316e-08, 1199586.00412446, -1.3414392979067865e-07, 3354342.3127445388),
        (9.0, 2.47116843087249e-09, 21472868.891435347, -7.480641389658946e-09, 63807489.78090821),
        (12.0, 1.3931846888753607e-13, 329807225829.07416, -4.854736554985309e-13, 1135507502443.3708),
        (15.0, 2.1649625207379925e-18, 1.8982099567493588e+16, -8.420567954017772e-18, 7.319749203407011e+16),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn matches_high_precision_reference() {
        for (x, ai, bi, aip, bip) in REFERENCE {
            let v = airy_all(x).unwrap();
            assert!(rel(v.ai, ai) < 1e-12, "Ai({x}): {} vs {ai}", v.ai);
            assert!(rel(v.bi, bi) < 1e-12, "Bi({x}): {} vs {bi}", v.bi);
            assert!(rel(v.ai_prime, aip) < 1e-12, "Ai'({x}): {} vs {aip}", v.ai_prime);
            assert!(rel(v.bi_prime, bip) < 1e-12, "Bi'({x}): {} vs {bip}", v.bi_prime);
        }
    }

    #[test]
    fn origin_values() {
        let v = airy_all(0.0).unwrap();
        assert!((v.ai - 0.355028053887817).abs() < 1e-15);
        assert!((v.bi / v.ai - 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn wronskian_on_fifty_grid_points() {
        let inv_pi = 1.0 / std::f64::consts::PI;
        for i in 0..50 {
            let x = -15.0 + 30.0 * (i as f64 + 0.5) / 50.0;
            let v = airy_all(x).unwrap();
            let w = v.ai * v.bi_prime - v.ai_prime * v.bi;
            assert!((w - inv_pi).abs() < 1e-8, "Wronskian at {x}: {w}");
        }
    }

    #[test]
    fn series_and_asymptotics_agree_in_the_overlap() {
        // Both branches are near machine precision around the split point.
        for &x in &[7.6, 7.9, 8.4, 8.9] {
            let s = maclaurin(x, &SeriesControl::default()).unwrap();
            let from_series = AI0.mul(s.0).add(AIP0.mul(s.1)).to_f64();
            let from_asym = asymptotic(x);
            assert!(rel(from_series, from_asym.ai) < 1e-11, "Ai mismatch at {x}");
            let bi_series = BI0.mul(s.0).add(BIP0.mul(s.1)).to_f64();
            assert!(rel(bi_series, from_asym.bi) < 1e-11, "Bi mismatch at {x}");
        }
    }

    #[test]
    fn ode_residual_via_finite_differences() {
        // f″ = x·f with a 5-point stencil; h chosen so truncation ≈ rounding.
        let h = 3e-3;
        for i in 0..=60 {
            let x = -10.0 + 15.0 * i as f64 / 60.0;
            for get in [|v: AiryValues| v.ai, |v: AiryValues| v.bi] {
                let f = |y: f64| get(airy_all(y).unwrap());
                let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x)
                    + 16.0 * f(x + h)
                    - f(x + 2.0 * h))
                    / (12.0 * h * h);
                let res = (d2 - x * f(x)).abs();
                assert!(res < 1e-6, "ODE residual {res} at x={x}");
            }
        }
    }

    #[test]
    fn monotone_tails() {
        assert!(airy_ai(10.0).unwrap() < airy_ai(9.0).unwrap());
        assert!(airy_bi(10.0).unwrap() > airy_bi(9.0).unwrap());
        assert!(airy_ai(15.0).unwrap() > 0.0);
    }

    #[test]
    fn rejects_out_of_window_arguments() {
        assert!(matches!(airy_ai(15.5), Err(Error::Domain(_))));
        assert!(matches!(airy_ai(-16.0), Err(Error::Domain(_))));
        assert!(airy_ai(f64::NAN).is_err());
    }

    #[test]
    fn tiny_term_budget_reports_series_limit() {
        let ctl = SeriesControl { max_terms: 16, abs_tol: 1e-12 };
        assert!(matches!(airy_all_with(-14.0, &ctl), Err(Error::SeriesLimit(_))));
        // At small arguments 16 terms are plenty.
        assert!(airy_all_with(0.5, &ctl).is_ok());
    }
}
