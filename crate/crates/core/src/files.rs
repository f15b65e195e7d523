//! Target and schedule file formats, and the fixed-format text writer used for
//! every command's output.
//!
//! All quantities are dimensionless: energies in units of `g`, durations as
//! `g tau`. Floats are written with 17 significant digits so a value read back
//! is bit-identical to the one written.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::dicke::{DickeState, SystemParams, RENORMALIZE_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::{effective_rabi, resonant_detuning, PulseSpec};
use crate::synthesis::{PulseSequence, Synthesis};

/// Relative tolerance for redundant schedule fields (detuning, rotation angle).
const CONSISTENCY_TOL: f64 = 1e-12;

/// A value in an output document. Objects keep insertion order.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Array(Vec<Value>),
    Object(Vec<(String, Value)>),
}

impl Value {
    pub fn object<K: Into<String>>(fields: impl IntoIterator<Item = (K, Value)>) -> Value {
        Value::Object(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn nums(xs: impl IntoIterator<Item = f64>) -> Value {
        Value::Array(xs.into_iter().map(Value::Num).collect())
    }

    pub fn complex(c: Complex64) -> Value {
        Value::object([("re", Value::Num(c.re)), ("im", Value::Num(c.im))])
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Value::Array(_) | Value::Object(_))
    }

    fn is_flat(&self) -> bool {
        match self {
            Value::Array(items) => items.iter().all(Value::is_scalar),
            Value::Object(fields) => fields.iter().all(|(_, v)| v.is_scalar()),
            _ => true,
        }
    }

    /// Renders as JSON with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Value::Null => out.push_str("null"),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Int(i) => write!(out, "{i}").unwrap(),
            Value::Num(x) => out.push_str(&format_float(*x)),
            Value::Str(s) => out.push_str(&serde_json::to_string(s).unwrap()),
            Value::Array(items) if items.is_empty() => out.push_str("[]"),
            Value::Object(fields) if fields.is_empty() => out.push_str("{}"),
            Value::Array(items) if self.is_flat() => {
                out.push('[');
                for (n, item) in items.iter().enumerate() {
                    if n > 0 {
                        out.push_str(", ");
                    }
                    item.write(out, indent);
                }
                out.push(']');
            }
            Value::Object(fields) if self.is_flat() && fields.len() <= 4 => {
                out.push('{');
                for (n, (k, v)) in fields.iter().enumerate() {
                    if n > 0 {
                        out.push_str(", ");
                    }
                    write!(out, "{}: ", serde_json::to_string(k).unwrap()).unwrap();
                    v.write(out, indent);
                }
                out.push('}');
            }
            Value::Array(items) => {
                out.push_str("[\n");
                for (n, item) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    item.write(out, indent + 1);
                    out.push_str(if n + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Value::Object(fields) => {
                out.push_str("{\n");
                for (n, (k, v)) in fields.iter().enumerate() {
                    pad(out, indent + 1);
                    write!(out, "{}: ", serde_json::to_string(k).unwrap()).unwrap();
                    v.write(out, indent + 1);
                    out.push_str(if n + 1 < fields.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// 17 significant digits in exponent form; non-finite values become `null`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficient {
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    n_dots: usize,
    coefficients: Vec<RawCoefficient>,
}

/// A parsed target file.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetFile {
    pub state: DickeState,
    /// `sum |c|^2` as read, before renormalization.
    pub input_norm_sqr: f64,
}

impl TargetFile {
    /// True when the input norm differed from one by more than rounding noise.
    pub fn renormalized(&self) -> bool {
        (self.input_norm_sqr - 1.0).abs() > 1e-12
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawTarget =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("target file: {e}")))?;
        if raw.n_dots == 0 {
            return Err(Error::Input("n_dots: must be at least 1".into()));
        }
        if raw.coefficients.len() != raw.n_dots + 1 {
            return Err(Error::Input(format!(
                "coefficients: expected {} entries for n_dots = {}, found {}",
                raw.n_dots + 1,
                raw.n_dots,
                raw.coefficients.len()
            )));
        }
        let amps: Vec<Complex64> = raw
            .coefficients
            .iter()
            .map(|c| Complex64::new(c.re, c.im))
            .collect();
        let input_norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (input_norm_sqr - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::Input(format!(
                "coefficients: not normalized, sum |c|^2 = {input_norm_sqr}"
            )));
        }
        let state =
            DickeState::new(amps).map_err(|e| Error::Input(format!("coefficients: {e}")))?;
        Ok(TargetFile {
            state,
            input_norm_sqr,
        })
    }

    pub fn render(state: &DickeState) -> String {
        Value::object([
            ("n_dots", Value::Int(state.n_dots() as i64)),
            (
                "coefficients",
                Value::Array(
                    state
                        .amplitudes()
                        .iter()
                        .map(|c| Value::complex(*c))
                        .collect(),
                ),
            ),
        ])
        .render()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    step_index: usize,
    detuning_over_g: f64,
    omega_tau: f64,
    phase: f64,
    duration_g: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    n_dots: usize,
    w_over_g: f64,
    pulses: Vec<RawPulse>,
    removed_global_phase: f64,
}

/// A parsed schedule file, in units of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleFile {
    pub sequence: PulseSequence,
    pub removed_global_phase: f64,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_TOL * a.abs().max(b.abs()).max(1.0)
}

impl ScheduleFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawSchedule =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("schedule file: {e}")))?;
        let params = SystemParams::in_units_of_g(raw.n_dots, raw.w_over_g).map_err(|e| {
            let field = if raw.n_dots == 0 {
                "n_dots"
            } else {
                "w_over_g"
            };
            Error::Input(format!("{field}: {e}"))
        })?;
        let n = raw.n_dots;
        let mut pulses = Vec::with_capacity(raw.pulses.len());
        for (ordinal, p) in raw.pulses.iter().enumerate() {
            let field = |name: &str| format!("pulses[{ordinal}].{name}");
            let pulse = PulseSpec {
                step_index: p.step_index,
                duration: p.duration_g,
                phase: p.phase,
                amplitude: 1.0,
            };
            if p.step_index >= n {
                return Err(Error::Input(format!(
                    "{}: {} out of range for n_dots = {n}",
                    field("step_index"),
                    p.step_index
                )));
            }
            pulse
                .validate(n)
                .map_err(|e| Error::Input(format!("pulses[{ordinal}]: {e}")))?;
            let detuning = resonant_detuning(n, p.step_index, raw.w_over_g)?;
            if !close(detuning, p.detuning_over_g) {
                return Err(Error::Input(format!(
                    "{}: {} does not match the resonance of step {} (expected {detuning})",
                    field("detuning_over_g"),
                    p.detuning_over_g,
                    p.step_index
                )));
            }
            let angle = effective_rabi(n, p.step_index, 1.0)? * p.duration_g;
            if !close(angle, p.omega_tau) {
                return Err(Error::Input(format!(
                    "{}: {} does not match duration_g (expected {angle})",
                    field("omega_tau"),
                    p.omega_tau
                )));
            }
            if p.omega_tau > FRAC_PI_2 + CONSISTENCY_TOL {
                return Err(Error::Input(format!(
                    "{}: {} exceeds pi/2",
                    field("omega_tau"),
                    p.omega_tau
                )));
            }
            pulses.push(pulse);
        }
        let sequence =
            PulseSequence::new(params, pulses).map_err(|e| Error::Input(format!("pulses: {e}")))?;
        if !raw.removed_global_phase.is_finite() {
            return Err(Error::Input("removed_global_phase: not finite".into()));
        }
        Ok(ScheduleFile {
            sequence,
            removed_global_phase: raw.removed_global_phase,
        })
    }

    /// Renders a schedule compiled with `g = 1`.
    pub fn render(synthesis: &Synthesis) -> Result<String> {
        let seq = &synthesis.sequence;
        let params = seq.params();
        if params.g_amplitude() != 1.0 {
            return Err(Error::domain(
                "schedule files are written in units of g = 1",
            ));
        }
        let n = params.n_dots();
        let mut pulses = Vec::with_capacity(seq.len());
        for p in seq.pulses() {
            pulses.push(Value::object([
                ("step_index", Value::Int(p.step_index as i64)),
                (
                    "detuning_over_g",
                    Value::Num(resonant_detuning(n, p.step_index, params.w_coupling())?),
                ),
                ("omega_tau", Value::Num(p.rotation_angle(n)?)),
                ("phase", Value::Num(p.phase)),
                ("duration_g", Value::Num(p.duration)),
            ]));
        }
        Ok(Value::object([
            ("n_dots", Value::Int(n as i64)),
            ("w_over_g", Value::Num(params.w_over_g())),
            ("pulses", Value::Array(pulses)),
            (
                "removed_global_phase",
                Value::Num(synthesis.removed_global_phase),
            ),
        ])
        .render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{synthesize, target_uniform};

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, std::f64::consts::PI] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn target_round_trip() {
        let t = target_uniform(3).unwrap();
        let text = TargetFile::render(&t);
        let parsed = TargetFile::parse(&text).unwrap();
        assert_eq!(parsed.state, t);
    }

    #[test]
    fn target_errors_name_the_field() {
        let err = TargetFile::parse(r#"{"n_dots": 2, "coefficients": [{"re": 1, "im": 0}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("coefficients"), "{err}");
        let err = TargetFile::parse(r#"{"coefficients": []}"#).unwrap_err();
        assert!(err.to_string().contains("n_dots"), "{err}");
        let err = TargetFile::parse(
            r#"{"n_dots": 1, "coefficients": [{"re": 1, "im": 0}, {"re": 1, "im": 0}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not normalized"), "{err}");
        let err =
            TargetFile::parse(r#"{"n_dots": 1, "coefficients": [{"re": 1}, {"re": 0, "im": 0}]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("im"), "{err}");
    }

    #[test]
    fn target_renormalizes_small_drift() {
        let t = TargetFile::parse(
            r#"{"n_dots": 1, "coefficients": [{"re": 1.0000001, "im": 0}, {"re": 0, "im": 0}]}"#,
        )
        .unwrap();
        assert!(t.renormalized());
        assert!((t.state.norm_sqr() - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rounded = TargetFile::parse(&format!(
            r#"{{"n_dots": 2, "coefficients": [{{"re": {h:.16e}, "im": 0}}, {{"re": 0, "im": 0}}, {{"re": {h:.16e}, "im": 0}}]}}"#
        ))
        .unwrap();
        assert!(!rounded.renormalized());
    }

    #[test]
    fn schedule_round_trip() {
        let params = SystemParams::in_units_of_g(3, 250.0).unwrap();
        let s = synthesize(&target_uniform(3).unwrap(), &params).unwrap();
        let text = ScheduleFile::render(&s).unwrap();
        let parsed = ScheduleFile::parse(&text).unwrap();
        assert_eq!(parsed.sequence, s.sequence);
        assert_eq!(parsed.removed_global_phase, s.removed_global_phase);
    }

    #[test]
    fn schedule_rejects_inconsistent_detuning() {
        let text = r#"{"n_dots": 2, "w_over_g": 100.0, "removed_global_phase": 0.0,
            "pulses": [{"step_index": 0, "detuning_over_g": 5.0, "omega_tau": 0.5,
                        "phase": 0.0, "duration_g": 0.35355339059327373}]}"#;
        let err = ScheduleFile::parse(text).unwrap_err();
        assert!(
            err.to_string().contains("pulses[0].detuning_over_g"),
            "{err}"
        );
    }

    #[test]
    fn nested_rendering_shape() {
        let v = Value::object([
            ("a", Value::Int(1)),
            ("b", Value::nums([1.0, 2.0])),
            (
                "c",
                Value::Array(vec![Value::complex(Complex64::new(0.5, 0.0))]),
            ),
            ("d", Value::Null),
        ]);
        let text = v.render();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["c"][0]["re"], 0.5);
        assert!(parsed["d"].is_null());
    }
}
