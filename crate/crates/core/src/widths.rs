//! Closed-form width oracles and the rigid / non-rigid classification of
//! exponent tuples `(p1, p2, q1, q2)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::norms::{
    d0_exponents, d0_mixed, pow_rational, ratio_string, BlockShape, Exponent, Rational,
};
use crate::sweep::{measure_size, PartitionChoice, SizeMeasurement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Rigid,
    NonRigid,
}

/// Proof case for rigid tuples, first failing condition for non-rigid ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// `p1 >= q1`, `p2 >= q2`.
    A,
    /// `p1 < q1 <= 2`, `p2 <= q2 <= 2`.
    B,
    /// `p1 < q1 <= 2`, `p2 >= q2`.
    C,
    /// `p1 >= q1`, `p2 < q2 <= 2`, `q1 >= q2`.
    D1,
    /// `p1 = q1 <= 2`, `p2 < q2 <= 2`.
    D2,
    /// `q1 > max{p1, 2}`.
    InnerFail,
    /// `q2 > max{p2, 2}`.
    OuterFail,
    /// `q1 < min{p1, q2}` and `p2 < q2 <= 2`.
    Exceptional,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::A => "a",
            CaseLabel::B => "b",
            CaseLabel::C => "c",
            CaseLabel::D1 => "d1",
            CaseLabel::D2 => "d2",
            CaseLabel::InnerFail => "inner-fail",
            CaseLabel::OuterFail => "outer-fail",
            CaseLabel::Exceptional => "exceptional",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub p1: Exponent,
    pub p2: Exponent,
    pub q1: Exponent,
    pub q2: Exponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeReport {
    pub p1: Exponent,
    pub p2: Exponent,
    pub q1: Exponent,
    pub q2: Exponent,
    pub verdict: Verdict,
    pub case_label: CaseLabel,
    /// `((1/q1 - 1/p1)_+, (1/q2 - 1/p2)_+)` as `"num/den"` strings.
    #[serde(serialize_with = "ser_exponents")]
    pub d0_exponents: (Rational, Rational),
}

fn ser_exponents<S: Serializer>(
    e: &(Rational, Rational),
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [ratio_string(e.0), ratio_string(e.1)].serialize(s)
}

impl RegimeReport {
    pub fn tuple(&self) -> Tuple {
        Tuple {
            p1: self.p1,
            p2: self.p2,
            q1: self.q1,
            q2: self.q2,
        }
    }

    pub fn is_exceptional(&self) -> bool {
        self.case_label == CaseLabel::Exceptional
    }

    /// One-line reason for the verdict.
    pub fn explanation(&self) -> String {
        let t = format!("({}, {}, {}, {})", self.p1, self.p2, self.q1, self.q2);
        match self.case_label {
            CaseLabel::InnerFail => {
                format!("{t} is non-rigid: condition (i) q1 <= max{{p1, 2}} fails")
            }
            CaseLabel::OuterFail => {
                format!("{t} is non-rigid: condition (ii) q2 <= max{{p2, 2}} fails")
            }
            CaseLabel::Exceptional => {
                format!("{t} is non-rigid: exceptional case q1 < min{{p1, q2}} and p2 < q2 <= 2")
            }
            label => format!("{t} is rigid (case {label})"),
        }
    }
}

/// Condition (i): `q1 <= max{p1, 2}`.
pub fn inner_condition(p1: Exponent, q1: Exponent) -> bool {
    q1 <= p1.max(Exponent::TWO)
}

/// Condition (ii): `q2 <= max{p2, 2}`.
pub fn outer_condition(p2: Exponent, q2: Exponent) -> bool {
    q2 <= p2.max(Exponent::TWO)
}

/// `q1 < min{p1, q2}` and `p2 < q2 <= 2`.
pub fn is_exceptional(p1: Exponent, p2: Exponent, q1: Exponent, q2: Exponent) -> bool {
    q1 < p1.min(q2) && p2 < q2 && q2 <= Exponent::TWO
}

/// Classifies the tuple; all comparisons are on exact reciprocals.
pub fn classify(p1: Exponent, p2: Exponent, q1: Exponent, q2: Exponent) -> RegimeReport {
    let two = Exponent::TWO;
    let (verdict, case_label) = if !inner_condition(p1, q1) {
        (Verdict::NonRigid, CaseLabel::InnerFail)
    } else if !outer_condition(p2, q2) {
        (Verdict::NonRigid, CaseLabel::OuterFail)
    } else if is_exceptional(p1, p2, q1, q2) {
        (Verdict::NonRigid, CaseLabel::Exceptional)
    } else {
        let label = if p1 >= q1 && p2 >= q2 {
            CaseLabel::A
        } else if p1 < q1 && q1 <= two && p2 <= q2 && q2 <= two {
            // p1 = q1 <= 2 has its own case d2.
            CaseLabel::B
        } else if p1 < q1 && q1 <= two && p2 >= q2 {
            CaseLabel::C
        } else if p1 >= q1 && q1 >= q2 {
            CaseLabel::D1
        } else {
            debug_assert!(p1 == q1 && q1 <= two && p2 < q2 && q2 <= two);
            CaseLabel::D2
        };
        (Verdict::Rigid, label)
    };
    RegimeReport {
        p1,
        p2,
        q1,
        q2,
        verdict,
        case_label,
        d0_exponents: d0_exponents(p1, p2, q1, q2),
    }
}

/// `d_n(B_p^N, l_q^N) = (N - n)^{1/q - 1/p}` for `p >= q`.
pub fn pietsch_stesin(big_n: usize, n: usize, p: Exponent, q: Exponent) -> Result<f64> {
    if p < q {
        return Err(Error::InvalidArgument(format!(
            "needs p >= q, got p = {p}, q = {q}"
        )));
    }
    if n > big_n {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds N = {big_n}"
        )));
    }
    if n == big_n {
        return Ok(0.0);
    }
    Ok(pow_rational((big_n - n) as f64, q.recip() - p.recip()))
}

/// `d_n(B_1^N, l_2^N) = (1 - n/N)^{1/2}`.
pub fn b1_l2_width(big_n: usize, n: usize) -> Result<f64> {
    if big_n == 0 || n > big_n {
        return Err(Error::InvalidArgument(format!(
            "needs 0 <= n <= N, N > 0 (got n = {n}, N = {big_n})"
        )));
    }
    Ok((1.0 - n as f64 / big_n as f64).sqrt())
}

/// Lower-bound chain for a rigid tuple, with unresolved constants kept as
/// symbols.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityCertificate {
    pub case_label: CaseLabel,
    pub s: usize,
    pub b: usize,
    pub n: usize,
    pub eps: f64,
    pub d0: f64,
    /// The reduction steps of the case, in order.
    pub chain: Vec<String>,
    /// Constant without a numeric value, e.g. `c(eps)`.
    pub symbolic_constant: Option<String>,
    /// Fully evaluated numeric part of the lower bound.
    pub numeric_factor: f64,
    /// `symbolic_constant * numeric_factor` as text.
    pub lower_bound: String,
}

pub fn rigidity_certificate(
    report: &RegimeReport,
    s: usize,
    b: usize,
    n: usize,
    eps: f64,
) -> Result<RigidityCertificate> {
    if report.verdict != Verdict::Rigid {
        return Err(Error::NonRigidTuple(report.case_label.to_string()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    let shape = BlockShape::new(s, b)?;
    let big_n = shape.n();
    if n as f64 > big_n as f64 * (1.0 - eps) {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds N (1 - eps) = {}",
            big_n as f64 * (1.0 - eps)
        )));
    }
    let Tuple { p1, p2, q1, q2 } = report.tuple();
    let d0 = d0_mixed(shape, p1, p2, q1, q2);
    let (sf, bf) = (s as f64, b as f64);
    let e = |x: Exponent| x.to_string();

    let (chain, symbolic, numeric) = match report.case_label {
        CaseLabel::A => {
            let cube = format!(
                "d_n(B_{{{},{}}}, l_{{{},{}}}) >= s^{{-1/{}}} b^{{-1/{}}} d_n(B_inf^N, l_{{{},{}}})",
                e(p1), e(p2), e(q1), e(q2), e(p1), e(p2), e(q1), e(q2)
            );
            let flat = if q1 <= q2 {
                format!(
                    "d_n(B_inf^N, l_{{{},{}}}) >= b^{{1/{}-1/{}}} d_n(B_inf^N, l_{}^N)",
                    e(q1),
                    e(q2),
                    e(q2),
                    e(q1),
                    e(q1)
                )
            } else {
                format!(
                    "d_n(B_inf^N, l_{{{},{}}}) >= s^{{1/{}-1/{}}} d_n(B_inf^N, l_{}^N)",
                    e(q1),
                    e(q2),
                    e(q1),
                    e(q2),
                    e(q2)
                )
            };
            let inner = q1.min(q2);
            let ps = format!(
                "d_n(B_inf^N, l_{}^N) = (N-n)^{{1/{}}} >= eps N^{{1/{}}}",
                e(inner),
                e(inner),
                e(inner)
            );
            let value = eps * d0;
            (
                vec![
                    cube,
                    flat,
                    ps,
                    format!("total: eps s^{{1/q1-1/p1}} b^{{1/q2-1/p2}} = {value}"),
                ],
                None,
                value,
            )
        }
        CaseLabel::B | CaseLabel::D2 => {
            let value = eps.sqrt();
            (
                vec![
                    "d_n(B_{p1,p2}, l_{q1,q2}) >= d_n(B_1^N, l_2^N)".to_string(),
                    format!("d_n(B_1^N, l_2^N) = (1-n/N)^{{1/2}} >= eps^{{1/2}} = {value}"),
                ],
                None,
                value,
            )
        }
        CaseLabel::C => {
            let ex = q2.recip() - p2.recip();
            let value = pow_rational(bf, ex);
            (
                vec![
                    format!(
                        "d_n(B_{{{},{}}}, l_{{{},{}}}) >= d_n(B_{{1,{}}}, l_{{2,{}}})",
                        e(p1),
                        e(p2),
                        e(q1),
                        e(q2),
                        e(p2),
                        e(q2)
                    ),
                    format!(
                        "d_n(B_{{1,{}}}, l_{{2,{}}}) >= b^{{-1/{}}} d_n(B_{{1,inf}}, l_{{2,{}}})",
                        e(p2),
                        e(q2),
                        e(p2),
                        e(q2)
                    ),
                    format!(
                        "d_n(B_{{1,inf}}, l_{{2,{}}}) >= b^{{-1+1/{}}} d_n(B_{{1,inf}}, l_{{2,1}})",
                        e(q2),
                        e(q2)
                    ),
                    "d_n(B_{1,inf}, l_{2,1}) >= c(eps) b".to_string(),
                    format!(
                        "total: c(eps) b^{{{}}} = c(eps) * {value}",
                        ratio_string(ex)
                    ),
                ],
                Some("c(eps)".to_string()),
                value,
            )
        }
        CaseLabel::D1 => {
            let ex = q1.recip() - p1.recip();
            let value = pow_rational(sf, ex);
            (
                vec![
                    format!("d_n(B_{{{},{}}}, l_{{{},{}}}) >= s^{{1/{}-1/{}}} d_n(B_{{{},{}}}, l_{}^N)", e(p1), e(p2), e(q1), e(q2), e(q1), e(q2), e(p1), e(p2), e(q2)),
                    format!("d_n(B_{{{},{}}}, l_{}^N) >= c({}, eps) s^{{(1/{}-1/{})_+}} b^{{(1/{}-1/{})_+}}", e(p1), e(p2), e(q2), e(q2), e(q2), e(p1), e(q2), e(p2)),
                    format!("total: c(q2, eps) s^{{{}}} = c(q2, eps) * {value}", ratio_string(ex)),
                ],
                Some("c(q2, eps)".to_string()),
                value,
            )
        }
        _ => unreachable!("rigid verdicts carry a proof case"),
    };
    assert!(numeric > 0.0, "numeric factor must be positive");
    let lower_bound = match &symbolic {
        Some(c) => format!("{c} * {numeric}"),
        None => numeric.to_string(),
    };
    Ok(RigidityCertificate {
        case_label: report.case_label,
        s,
        b,
        n,
        eps,
        d0,
        chain,
        symbolic_constant: symbolic,
        numeric_factor: numeric,
        lower_bound,
    })
}

/// Evidence that a non-rigid tuple is well approximated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonRigidityWitness {
    /// Coordinate ball already non-rigid; the bound is quoted, not computed.
    Analytic {
        case_label: CaseLabel,
        statement: String,
    },
    /// Measured through the spreading pipeline.
    Measured(SizeMeasurement),
}

/// Options for [`nonrigidity_witness`].
#[derive(Clone, Copy, Debug)]
pub struct WitnessConfig {
    pub partition: PartitionChoice,
    pub samples: usize,
    pub seed: u64,
    pub d: Option<u32>,
    pub k: Option<usize>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            partition: PartitionChoice::Good,
            samples: 32,
            seed: 0,
            d: None,
            k: None,
        }
    }
}

pub fn nonrigidity_witness(
    p1: Exponent,
    p2: Exponent,
    q1: Exponent,
    q2: Exponent,
    s: usize,
    b: usize,
    config: &WitnessConfig,
) -> Result<NonRigidityWitness> {
    let report = classify(p1, p2, q1, q2);
    match report.case_label {
        CaseLabel::InnerFail => Ok(NonRigidityWitness::Analytic {
            case_label: report.case_label,
            statement: format!(
                "q1 = {q1} > max{{p1, 2}}: d_n(B_{p1}^s, l_{q1}^s) <= C(p1,q1) s^{{-delta}} for n >= s^{{1-delta}}, delta = delta(p1,q1) > 0; applied blockwise"
            ),
        }),
        CaseLabel::OuterFail => Ok(NonRigidityWitness::Analytic {
            case_label: report.case_label,
            statement: format!(
                "q2 = {q2} > max{{p2, 2}}: d_n(B_{p2}^b, l_{q2}^b) <= C(p2,q2) b^{{-delta}} for n >= b^{{1-delta}}, delta = delta(p2,q2) > 0; applied to the block profile"
            ),
        }),
        CaseLabel::Exceptional => {
            let tuple = Tuple { p1, p2, q1, q2 };
            let m = measure_size(tuple, s, b, config.partition, config.samples, config.seed, config.d, config.k)?;
            Ok(NonRigidityWitness::Measured(m))
        }
        label => Err(Error::RigidTuple(label.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn label(p1: &str, p2: &str, q1: &str, q2: &str) -> (Verdict, CaseLabel) {
        let r = classify(e(p1), e(p2), e(q1), e(q2));
        (r.verdict, r.case_label)
    }

    #[test]
    fn anchored_labels() {
        assert_eq!(
            label("inf", "inf", "2", "2"),
            (Verdict::Rigid, CaseLabel::A)
        );
        assert_eq!(
            label("inf", "1", "1", "2"),
            (Verdict::NonRigid, CaseLabel::Exceptional)
        );
        assert_eq!(label("1", "inf", "2", "1"), (Verdict::Rigid, CaseLabel::C));
        assert_eq!(
            label("1", "1", "3", "1"),
            (Verdict::NonRigid, CaseLabel::InnerFail)
        );
        assert_eq!(
            label("inf", "1", "1", "3"),
            (Verdict::NonRigid, CaseLabel::OuterFail)
        );
        // q2 = 3 <= max{inf, 2}: condition (ii) holds.
        assert_eq!(
            label("inf", "inf", "1", "3"),
            (Verdict::Rigid, CaseLabel::A)
        );
        assert_eq!(label("1", "1", "2", "2"), (Verdict::Rigid, CaseLabel::B));
        assert_eq!(
            label("inf", "1", "2", "3/2"),
            (Verdict::Rigid, CaseLabel::D1)
        );
        assert_eq!(
            label("3/2", "1", "3/2", "2"),
            (Verdict::Rigid, CaseLabel::D2)
        );
    }

    #[test]
    fn report_json() {
        let r = classify(e("inf"), e("1"), e("1"), e("2"));
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"p1":"inf","p2":"1","q1":"1","q2":"2","verdict":"NonRigid","case_label":"exceptional","d0_exponents":["1/1","0/1"]}"#
        );
    }

    #[test]
    fn width_formulas() {
        let (inf, one) = (e("inf"), e("1"));
        assert_eq!(pietsch_stesin(16, 8, inf, one).unwrap(), 8.0);
        assert_eq!(pietsch_stesin(16, 0, inf, one).unwrap(), 16.0);
        assert_eq!(pietsch_stesin(16, 16, inf, one).unwrap(), 0.0);
        assert!(pietsch_stesin(16, 0, one, inf).is_err());
        assert_eq!(b1_l2_width(4, 0).unwrap(), 1.0);
        assert_eq!(b1_l2_width(4, 4).unwrap(), 0.0);
        assert_eq!(b1_l2_width(4, 2).unwrap(), 0.5f64.sqrt());
        assert!(b1_l2_width(4, 5).is_err());
    }

    #[test]
    fn certificates() {
        let r = classify(e("inf"), e("inf"), e("1"), e("2"));
        let c = rigidity_certificate(&r, 4, 4, 8, 0.5).unwrap();
        assert_eq!(c.case_label, CaseLabel::A);
        assert_eq!(c.numeric_factor, 4.0);
        assert!(c.symbolic_constant.is_none());

        let r = classify(e("1"), e("1"), e("2"), e("2"));
        let c = rigidity_certificate(&r, 4, 4, 8, 0.25).unwrap();
        assert_eq!(c.numeric_factor, 0.5);

        let r = classify(e("1"), e("inf"), e("2"), e("1"));
        let c = rigidity_certificate(&r, 9, 16, 10, 0.5).unwrap();
        assert_eq!(c.symbolic_constant.as_deref(), Some("c(eps)"));
        assert_eq!(c.numeric_factor, 16.0);

        let r = classify(e("inf"), e("1"), e("2"), e("3/2"));
        let c = rigidity_certificate(&r, 16, 3, 10, 0.5).unwrap();
        assert_eq!(c.symbolic_constant.as_deref(), Some("c(q2, eps)"));
        assert_eq!(c.numeric_factor, 4.0);

        let r = classify(e("inf"), e("1"), e("1"), e("2"));
        assert!(matches!(
            rigidity_certificate(&r, 4, 4, 1, 0.5),
            Err(Error::NonRigidTuple(_))
        ));
        let r = classify(e("inf"), e("inf"), e("1"), e("2"));
        assert!(rigidity_certificate(&r, 4, 4, 9, 0.5).is_err());
    }

    #[test]
    fn witnesses() {
        let w = nonrigidity_witness(
            e("1"),
            e("1"),
            e("3"),
            e("1"),
            8,
            8,
            &WitnessConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            w,
            NonRigidityWitness::Analytic {
                case_label: CaseLabel::InnerFail,
                ..
            }
        ));
        let err = nonrigidity_witness(
            e("2"),
            e("2"),
            e("2"),
            e("2"),
            8,
            8,
            &WitnessConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::RigidTuple(_)));

        let cfg = WitnessConfig {
            partition: PartitionChoice::Transposition,
            samples: 8,
            ..WitnessConfig::default()
        };
        match nonrigidity_witness(e("inf"), e("1"), e("1"), e("2"), 16, 16, &cfg).unwrap() {
            NonRigidityWitness::Measured(m) => {
                assert_eq!(m.dim, 136);
                assert!(m.ratio <= 0.25);
            }
            other => panic!("{other:?}"),
        }
    }
}
