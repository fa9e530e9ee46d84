//! Binary snapshots, diagnostics CSV and the run manifest.
//!
//! All binary data is little-endian.
//!
//! Snapshot (`WPSN`): magic, `u32` version, `u64 nx`, `u64 nv`, `f64 t`,
//! `f64 H`, then `nx · nv` values in row-major order (`x` slow).
//!
//! Factor file (`WPLR`): magic, `u32` version, `u64 nx`, `u64 nv`, `u64 r`,
//! `f64 t`, `f64 H`, then `U` (`nx × r`, row-major), `σ` (`r`), `V`
//! (`nv × r`, row-major).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;

use crate::config::config_echo;
use crate::diagnostics::DiagnosticsRecord;
use crate::distribution::DistributionMatrix;
use crate::error::{Result, WignerError};
use crate::lowrank::LowRankFactors;
use crate::solver::SolverConfig;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"WPSN";
pub const FACTORS_MAGIC: &[u8; 4] = b"WPLR";
pub const FORMAT_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "t,mass,mass_rel_err,momentum,momentum_err,ee_norm,rank,rank95,rank99,rank9999,rank999999,rank99999999,imag_residual";

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub t: f64,
    pub h: f64,
    pub matrix: DistributionMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorFile {
    pub t: f64,
    pub h: f64,
    pub factors: LowRankFactors,
}

pub fn encode_snapshot(f: &DistributionMatrix, t: f64, h: f64) -> Vec<u8> {
    let mut b = Vec::with_capacity(32 + 8 * f.as_slice().len());
    b.extend_from_slice(SNAPSHOT_MAGIC);
    b.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    b.extend_from_slice(&(f.nx() as u64).to_le_bytes());
    b.extend_from_slice(&(f.nv() as u64).to_le_bytes());
    b.extend_from_slice(&t.to_le_bytes());
    b.extend_from_slice(&h.to_le_bytes());
    for x in f.as_slice() {
        b.extend_from_slice(&x.to_le_bytes());
    }
    b
}

pub fn write_snapshot(path: &Path, f: &DistributionMatrix, t: f64, h: f64) -> Result<()> {
    fs::write(path, encode_snapshot(f, t, h)).map_err(|e| WignerError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotFile> {
    let bytes = fs::read(path).map_err(|e| WignerError::io(path, e))?;
    decode_snapshot(&bytes).map_err(|reason| WignerError::Format {
        path: path.to_path_buf(),
        reason,
    })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], String> {
        let end = self.pos + N;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        self.pos = end;
        Ok(s.try_into().expect("length checked"))
    }

    fn header(&mut self, magic: &[u8; 4]) -> std::result::Result<(), String> {
        if &self.take::<4>()? != magic {
            return Err(format!("bad magic, expected {}", String::from_utf8_lossy(magic)));
        }
        let version = u32::from_le_bytes(self.take()?);
        if version != FORMAT_VERSION {
            return Err(format!("unsupported version {version}"));
        }
        Ok(())
    }

    fn u64(&mut self) -> std::result::Result<usize, String> {
        usize::try_from(u64::from_le_bytes(self.take()?)).map_err(|e| e.to_string())
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        let need = n.checked_mul(8).ok_or("size overflow")?;
        if self.bytes.len() - self.pos < need {
            return Err(format!("expected {n} values, file is truncated"));
        }
        (0..n).map(|_| self.f64()).collect()
    }

    fn finish(&self) -> std::result::Result<(), String> {
        if self.pos != self.bytes.len() {
            return Err(format!("{} trailing bytes", self.bytes.len() - self.pos));
        }
        Ok(())
    }
}

pub fn decode_snapshot(bytes: &[u8]) -> std::result::Result<SnapshotFile, String> {
    let mut r = Reader { bytes, pos: 0 };
    r.header(SNAPSHOT_MAGIC)?;
    let nx = r.u64()?;
    let nv = r.u64()?;
    let t = r.f64()?;
    let h = r.f64()?;
    let data = r.f64s(nx.checked_mul(nv).ok_or("size overflow")?)?;
    r.finish()?;
    let matrix = DistributionMatrix::from_vec(nx, nv, data).map_err(|e| e.to_string())?;
    Ok(SnapshotFile { t, h, matrix })
}

pub fn encode_factors(f: &LowRankFactors, t: f64, h: f64) -> Vec<u8> {
    let (nx, nv, r) = (f.nrows(), f.ncols(), f.rank());
    let mut b = Vec::with_capacity(40 + 8 * (nx * r + r + nv * r));
    b.extend_from_slice(FACTORS_MAGIC);
    b.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for n in [nx, nv, r] {
        b.extend_from_slice(&(n as u64).to_le_bytes());
    }
    b.extend_from_slice(&t.to_le_bytes());
    b.extend_from_slice(&h.to_le_bytes());
    let mut put = |x: f64| b.extend_from_slice(&x.to_le_bytes());
    for i in 0..nx {
        for m in 0..r {
            put(f.u[(i, m)]);
        }
    }
    for s in &f.sigma {
        put(*s);
    }
    for j in 0..nv {
        for m in 0..r {
            put(f.v[(j, m)]);
        }
    }
    b
}

pub fn decode_factors(bytes: &[u8]) -> std::result::Result<FactorFile, String> {
    let mut rd = Reader { bytes, pos: 0 };
    rd.header(FACTORS_MAGIC)?;
    let nx = rd.u64()?;
    let nv = rd.u64()?;
    let r = rd.u64()?;
    let t = rd.f64()?;
    let h = rd.f64()?;
    let u = rd.f64s(nx.checked_mul(r).ok_or("size overflow")?)?;
    let sigma = rd.f64s(r)?;
    let v = rd.f64s(nv.checked_mul(r).ok_or("size overflow")?)?;
    rd.finish()?;
    Ok(FactorFile {
        t,
        h,
        factors: LowRankFactors {
            u: DMatrix::from_row_slice(nx, r, &u),
            sigma,
            v: DMatrix::from_row_slice(nv, r, &v),
        },
    })
}

pub fn write_factors(path: &Path, f: &LowRankFactors, t: f64, h: f64) -> Result<()> {
    fs::write(path, encode_factors(f, t, h)).map_err(|e| WignerError::io(path, e))
}

pub fn read_factors(path: &Path) -> Result<FactorFile> {
    let bytes = fs::read(path).map_err(|e| WignerError::io(path, e))?;
    decode_factors(&bytes).map_err(|reason| WignerError::Format {
        path: path.to_path_buf(),
        reason,
    })
}

/// 17 significant digits, enough to recover every `f64` exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let mut fields = vec![
            format_float(r.t),
            format_float(r.mass),
            format_float(r.mass_rel_err),
            format_float(r.momentum),
            format_float(r.momentum_err),
            format_float(r.ee_norm),
            r.rank.to_string(),
        ];
        fields.extend(r.ranks.iter().map(|k| k.to_string()));
        fields.push(format_float(r.imag_residual));
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

pub fn write_diagnostics(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    fs::write(path, diagnostics_csv(records)).map_err(|e| WignerError::io(path, e))
}

/// Parses a file written by [`write_diagnostics`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path).map_err(|e| WignerError::io(path, e))?;
    let fmt_err = |reason: String| WignerError::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(fmt_err("missing or unexpected header".into()));
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 13 {
                return Err(fmt_err(format!("row {}: expected 13 fields", n + 1)));
            }
            let fl = |k: usize| f[k].parse::<f64>().map_err(|e| fmt_err(format!("row {}: {e}", n + 1)));
            let int = |k: usize| f[k].parse::<i64>().map_err(|e| fmt_err(format!("row {}: {e}", n + 1)));
            Ok(DiagnosticsRecord {
                t: fl(0)?,
                mass: fl(1)?,
                mass_rel_err: fl(2)?,
                momentum: fl(3)?,
                momentum_err: fl(4)?,
                ee_norm: fl(5)?,
                rank: int(6)?,
                ranks: [int(7)?, int(8)?, int(9)?, int(10)?, int(11)?],
                imag_residual: fl(12)?,
            })
        })
        .collect()
}

/// Per-run record: metadata as `#` comment lines followed by the config
/// echo, so the whole file is itself a valid config.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SolverConfig,
    pub version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(config: &SolverConfig) -> Self {
        Self {
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            started: unix_time(),
            finished: f64::NAN,
            outputs: vec![],
        }
    }

    pub fn finish(&mut self) {
        self.finished = unix_time();
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "# wigner {}\n# seed: {}\n# started: {:.3}\n# finished: {:.3}\n",
            self.version, self.seed, self.started, self.finished
        );
        for o in &self.outputs {
            s.push_str(&format!("# output: {}\n", o.display()));
        }
        s.push_str(&config_echo(&self.config));
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path).map_err(|e| WignerError::io(path, e))?;
        file.write_all(self.render().as_bytes())
            .map_err(|e| WignerError::io(path, e))
    }
}

fn unix_time() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
