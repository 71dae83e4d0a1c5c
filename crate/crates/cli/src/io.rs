//! Files: atomic writes, the on-disk cache, period CSVs and JSON sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toric_core::arith::Q;
use toric_core::hecke::EigenformJson;
use toric_core::ideals::{ClassSet, ClassSetJson};
use toric_core::quat::OrderJson;
use toric_core::theta::{PeriodRecord, ThetaTable};
use toric_core::Error;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(Error::io(path, e))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.flush().map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_err(path, e))
}

pub fn to_json_bytes<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| CliError::Core(Error::Internal(e.to_string())))?;
    s.push(b'\n');
    Ok(s)
}

pub fn from_json_bytes<T: for<'a> Deserialize<'a>>(path: &Path, b: &[u8]) -> CliResult<T> {
    serde_json::from_slice(b).map_err(|e| CliError::Core(Error::Parse(format!("{}: {e}", path.display()))))
}

/// SHA-256 of the canonical class-set serialization: pins the class
/// ordering every per-class vector refers to.
pub fn fingerprint(cs: &ClassSet) -> CliResult<String> {
    let bytes = serde_json::to_vec(&cs.to_json()).map_err(|e| CliError::Core(Error::Internal(e.to_string())))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Cache files keyed by discriminant, level and schema version.
#[derive(Clone, Debug)]
pub struct Cache {
    pub dir: PathBuf,
    pub disc_d: u64,
    pub level: u64,
}

impl Cache {
    fn path(&self, kind: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{kind}_d{}_l{}_v{SCHEMA_VERSION}.{ext}", self.disc_d, self.level))
    }

    pub fn classes_path(&self) -> PathBuf {
        self.path("classes", "json")
    }

    pub fn theta_path(&self) -> PathBuf {
        self.path("theta", "bin")
    }

    pub fn load_classes(&self) -> CliResult<Option<ClassSet>> {
        let p = self.classes_path();
        if !p.exists() {
            return Ok(None);
        }
        let j: ClassSetJson = from_json_bytes(&p, &read(&p)?)?;
        if j.schema_version != SCHEMA_VERSION {
            return Ok(None);
        }
        Ok(Some(ClassSet::from_json(&j)?))
    }

    pub fn store_classes(&self, cs: &ClassSet) -> CliResult<()> {
        write_atomic(&self.classes_path(), &to_json_bytes(&cs.to_json())?)
    }

    /// A cached table is used if it was made for the same class ordering
    /// and reaches `bound`.
    pub fn load_theta(&self, fp: &str, bound: u64) -> CliResult<Option<ThetaTable>> {
        let p = self.theta_path();
        if !p.exists() {
            return Ok(None);
        }
        let b = read(&p)?;
        if b.len() < 64 || &b[..64] != fp.as_bytes() {
            return Ok(None);
        }
        let t = ThetaTable::from_bytes(&b[64..])?;
        Ok(if t.bound >= bound { Some(t) } else { None })
    }

    pub fn store_theta(&self, fp: &str, t: &ThetaTable) -> CliResult<()> {
        let mut b = fp.as_bytes().to_vec();
        b.extend(t.to_bytes());
        write_atomic(&self.theta_path(), &b)
    }
}

/// Integer coordinates joined by semicolons: `[-1, 1]` → `-1;1`.
pub fn join_coords<T: ToString>(c: &[T]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn split_coords<T: std::str::FromStr>(s: &str) -> CliResult<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|x| x.parse().map_err(|_| CliError::Core(Error::Parse(format!("bad coordinate {x}"))))).collect()
}

pub const PERIODS_HEADER: [&str; 8] = ["delta", "in_XD", "in_Y", "c", "h_E", "u_E", "a_coords", "period_coords"];

/// One CSV row per fundamental discriminant; an empty period column means
/// the level condition fails.
pub fn periods_csv(records: &[PeriodRecord]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Core(Error::Internal(e.to_string()));
    w.write_record(PERIODS_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.delta.to_string(),
            r.in_xd.to_string(),
            r.in_y.to_string(),
            r.c.to_string(),
            r.h_e.to_string(),
            r.u_e.to_string(),
            join_coords(&r.a),
            r.period.as_ref().map_or(String::new(), |p| join_coords(p)),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Core(Error::Internal(e.to_string())))
}

pub fn parse_periods_csv(path: &Path, bytes: &[u8]) -> CliResult<Vec<PeriodRecord>> {
    let perr = |m: String| CliError::Core(Error::Parse(format!("{}: {m}", path.display())));
    let mut r = csv::Reader::from_reader(bytes);
    let head = r.headers().map_err(|e| perr(e.to_string()))?;
    if head.iter().collect::<Vec<_>>() != PERIODS_HEADER {
        return Err(perr("unexpected header".into()));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| perr(e.to_string()))?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let p = |i: usize| -> CliResult<u64> { f(i).parse().map_err(|_| perr(format!("bad integer {}", f(i)))) };
        let b = |i: usize| -> CliResult<bool> { f(i).parse().map_err(|_| perr(format!("bad flag {}", f(i)))) };
        out.push(PeriodRecord {
            delta: f(0).parse().map_err(|_| perr(format!("bad delta {}", f(0))))?,
            in_xd: b(1)?,
            in_y: b(2)?,
            c: p(3)?,
            h_e: p(4)?,
            u_e: p(5)?,
            a: split_coords::<Q>(f(6))?,
            period: if f(7).is_empty() { None } else { Some(split_coords(f(7))?) },
        });
    }
    Ok(out)
}

/// Provenance written next to every periods CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodsSidecar {
    pub schema_version: String,
    pub disc_d: u64,
    pub level: u64,
    pub bound: u64,
    pub records: usize,
    pub in_y: usize,
    pub class_fingerprint: String,
    pub order: OrderJson,
    pub eigenform: EigenformJson,
}

#[cfg(test)]
mod tests {
    use super::*;
    use toric_core::arith::q;

    #[test]
    fn coordinates() {
        assert_eq!(join_coords(&[-1i64, 1]), "-1;1");
        assert_eq!(split_coords::<i64>("-1;1").unwrap(), vec![-1, 1]);
        assert_eq!(join_coords(&[q(3), Q::new(1.into(), 2.into())]), "3;1/2");
    }

    #[test]
    fn periods_round_trip() {
        let recs = vec![
            PeriodRecord {
                delta: -3,
                in_xd: true,
                in_y: true,
                c: 2,
                h_e: 1,
                u_e: 3,
                a: vec![q(-2), q(4)],
                period: Some(vec![-1, 2]),
            },
            PeriodRecord {
                delta: -4,
                in_xd: false,
                in_y: false,
                c: 1,
                h_e: 1,
                u_e: 2,
                a: vec![q(0), q(0)],
                period: None,
            },
        ];
        let b = periods_csv(&recs).unwrap();
        let text = String::from_utf8(b.clone()).unwrap();
        assert!(text.starts_with("delta,in_XD,in_Y,c,h_E,u_E,a_coords,period_coords\n-3,true,true,2,1,3,-2;4,-1;2\n"));
        assert_eq!(parse_periods_csv(Path::new("x.csv"), &b).unwrap(), recs);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
