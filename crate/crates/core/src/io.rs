//! Output formats: `%.17g`-style numeric formatting, the CSV schemas, and
//! the binary field-snapshot format (magic `SGGL`).

use std::io::{Read, Write};

use num_complex::Complex;

use crate::diagnostics::LemmaStatistic;
use crate::error::{CoreError, Result};
use crate::experiments::{ContractionRun, GalerkinRow};
use crate::integrator::{EnergyRecord, RecordKind, Trajectory};
use crate::lab::CheckReport;
use crate::real::Real;
use crate::spectral::SpectralField;

/// Formats like C's `printf("%.17g", x)`: 17 significant digits, fixed or
/// scientific depending on the decimal exponent, trailing zeros stripped,
/// two-digit exponent field.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf".into() } else { "inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // decimal exponent after rounding to 17 significant digits
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-4..17).contains(&exp) {
        let (mantissa, _) = sci.split_at(sci.find('e').unwrap());
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let prec = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", prec, x))
    }
}

fn strip_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

/// `t,l2_sq,h1_sq,l2s2_pow,mixed`, one row per grid time.
pub fn write_energy_csv<W: Write, T: Real>(out: &mut W, traj: &Trajectory<T>) -> Result<()> {
    writeln!(out, "t,l2_sq,h1_sq,l2s2_pow,mixed")?;
    for (r, k) in traj.records.iter().zip(&traj.kinds) {
        if *k != RecordKind::Grid {
            continue;
        }
        write_record_row(out, r)?;
    }
    Ok(())
}

fn write_record_row<W: Write, T: Real>(out: &mut W, r: &EnergyRecord<T>) -> Result<()> {
    writeln!(
        out,
        "{},{},{},{},{}",
        fmt_g17(r.t.as_f64()),
        fmt_g17(r.l2_sq.as_f64()),
        fmt_g17(r.h1_sq.as_f64()),
        fmt_g17(r.l2s2_pow.as_f64()),
        fmt_g17(r.mixed.as_f64()),
    )?;
    Ok(())
}

/// `lemma,n1,n2,value,se,rhs_scale,ratio`.
pub fn write_lemma_stats_csv<W: Write, T: Real>(
    out: &mut W,
    stats: &[LemmaStatistic<T>],
) -> Result<()> {
    writeln!(out, "lemma,n1,n2,value,se,rhs_scale,ratio")?;
    for s in stats {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.lemma.label(),
            s.n_modes.0,
            s.n_modes.1,
            fmt_g17(s.value.as_f64()),
            fmt_g17(s.se.as_f64()),
            fmt_g17(s.rhs_scale.as_f64()),
            fmt_g17(s.ratio.as_f64()),
        )?;
    }
    Ok(())
}

/// `check,sigma,beta,samples,violations,max_slack,tolerance`.
pub fn write_inequality_csv<W: Write, T: Real>(
    out: &mut W,
    reports: &[CheckReport<T>],
) -> Result<()> {
    writeln!(out, "check,sigma,beta,samples,violations,max_slack,tolerance")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.check,
            fmt_g17(r.sigma.as_f64()),
            fmt_g17(r.beta.as_f64()),
            r.samples,
            r.violations,
            fmt_g17(r.max_slack.as_f64()),
            fmt_g17(r.tolerance.as_f64()),
        )?;
    }
    Ok(())
}

/// `t,r,omega_l2_sq,contraction`.
pub fn write_contraction_csv<W: Write, T: Real>(
    out: &mut W,
    run: &ContractionRun<T>,
) -> Result<()> {
    writeln!(out, "t,r,omega_l2_sq,contraction")?;
    for i in 0..run.times.len() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_g17(run.times[i].as_f64()),
            fmt_g17(run.r_series[i].as_f64()),
            fmt_g17(run.omega_l2_sq[i].as_f64()),
            fmt_g17(run.contraction[i].as_f64()),
        )?;
    }
    Ok(())
}

/// `n,discrepancy,lemma31_ratio,lemma32_ratio`.
pub fn write_galerkin_csv<W: Write, T: Real>(
    out: &mut W,
    rows: &[GalerkinRow<T>],
) -> Result<()> {
    writeln!(out, "n,discrepancy,lemma31_ratio,lemma32_ratio")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.n,
            fmt_g17(r.discrepancy.as_f64()),
            fmt_g17(r.l31_ratio.as_f64()),
            fmt_g17(r.l32_ratio.as_f64()),
        )?;
    }
    Ok(())
}

const SNAPSHOT_MAGIC: &[u8; 4] = b"SGGL";
const SNAPSHOT_VERSION: u16 = 1;

/// Binary field snapshot: magic `SGGL`, version u16, n1 u32, n2 u32,
/// L1 f64, L2 f64, then row-major interleaved (re, im) f64, all
/// little-endian.
pub fn write_snapshot<W: Write>(out: &mut W, field: &SpectralField<f64>) -> Result<()> {
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&(field.n1() as u32).to_le_bytes())?;
    out.write_all(&(field.n2() as u32).to_le_bytes())?;
    out.write_all(&field.l1.to_le_bytes())?;
    out.write_all(&field.l2.to_le_bytes())?;
    for j in 0..field.n1() {
        for k in 0..field.n2() {
            let c = field.coeffs[[j, k]];
            out.write_all(&c.re.to_le_bytes())?;
            out.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(input: &mut R) -> Result<SpectralField<f64>> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(CoreError::Config("bad snapshot magic".into()));
    }
    let mut b2 = [0u8; 2];
    input.read_exact(&mut b2)?;
    let version = u16::from_le_bytes(b2);
    if version != SNAPSHOT_VERSION {
        return Err(CoreError::Config(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let mut b4 = [0u8; 4];
    input.read_exact(&mut b4)?;
    let n1 = u32::from_le_bytes(b4) as usize;
    input.read_exact(&mut b4)?;
    let n2 = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b8)?;
    let l1 = f64::from_le_bytes(b8);
    input.read_exact(&mut b8)?;
    let l2 = f64::from_le_bytes(b8);
    let mut field = SpectralField::zeros(n1, n2, l1, l2);
    for j in 0..n1 {
        for k in 0..n2 {
            input.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            input.read_exact(&mut b8)?;
            let im = f64::from_le_bytes(b8);
            field.coeffs[[j, k]] = Complex::new(re, im);
        }
    }
    Ok(field)
}

const WITNESS_MAGIC: &[u8; 4] = b"SGWT";

/// Violation witness: the check name, its parameters, and the field pair,
/// for replay.
pub fn write_witness<W: Write>(
    out: &mut W,
    check: &str,
    sigma: f64,
    beta: f64,
    pair: &(SpectralField<f64>, SpectralField<f64>),
) -> Result<()> {
    out.write_all(WITNESS_MAGIC)?;
    let name = check.as_bytes();
    out.write_all(&(name.len() as u16).to_le_bytes())?;
    out.write_all(name)?;
    out.write_all(&sigma.to_le_bytes())?;
    out.write_all(&beta.to_le_bytes())?;
    write_snapshot(out, &pair.0)?;
    write_snapshot(out, &pair.1)?;
    Ok(())
}

pub struct Witness {
    pub check: String,
    pub sigma: f64,
    pub beta: f64,
    pub u: SpectralField<f64>,
    pub phi: SpectralField<f64>,
}

pub fn read_witness<R: Read>(input: &mut R) -> Result<Witness> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != WITNESS_MAGIC {
        return Err(CoreError::Config("bad witness magic".into()));
    }
    let mut b2 = [0u8; 2];
    input.read_exact(&mut b2)?;
    let len = u16::from_le_bytes(b2) as usize;
    let mut name = vec![0u8; len];
    input.read_exact(&mut name)?;
    let check = String::from_utf8(name)
        .map_err(|_| CoreError::Config("witness name is not UTF-8".into()))?;
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b8)?;
    let sigma = f64::from_le_bytes(b8);
    input.read_exact(&mut b8)?;
    let beta = f64::from_le_bytes(b8);
    let u = read_snapshot(input)?;
    let phi = read_snapshot(input)?;
    Ok(Witness {
        check,
        sigma,
        beta,
        u,
        phi,
    })
}
