//! On-disk formats: diagnostic and slice CSVs, spectral checkpoints and
//! kernel-table dumps. Binary files are little-endian.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use hbolt_core::collision::KernelTable;
use hbolt_core::diagnostics::DiagRecord;
use hbolt_core::{SpectralField, TorusSpec};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DIAG_HEADER: &str =
    "t,mass,px,py,pz,energy,temperature,entropy,rel_entropy,fisher,l2_error,l2_to_equilibrium";

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"HBOLTCKP";
pub const KERNEL_MAGIC: &[u8; 8] = b"BZKERNEL";

/// Shortest decimal that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn diag_row(r: &DiagRecord) -> String {
    let mut fields: Vec<String> = [
        r.t,
        r.mass,
        r.momentum[0],
        r.momentum[1],
        r.momentum[2],
        r.energy,
        r.temperature,
        r.entropy,
        r.rel_entropy,
        r.fisher,
    ]
    .iter()
    .map(|&x| fmt_f64(x))
    .collect();
    fields.push(r.l2_error.map(fmt_f64).unwrap_or_default());
    fields.push(fmt_f64(r.l2_to_equilibrium));
    fields.join(",")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_diag_csv(path: &Path, records: &[DiagRecord]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{DIAG_HEADER}").map_err(io)?;
    for r in records {
        writeln!(w, "{}", diag_row(r)).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_diag_csv(path: &Path) -> Result<Vec<DiagRecord>> {
    let mut lines = open(path)?.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .unwrap_or_default();
    if header != DIAG_HEADER {
        return Err(Error::format(path, format!("unexpected header `{header}`")));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let bad = |what: &str| Error::format(path, format!("row {}: {what}", i + 1));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(bad("expected 12 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
        out.push(DiagRecord {
            t: num(fields[0])?,
            mass: num(fields[1])?,
            momentum: [num(fields[2])?, num(fields[3])?, num(fields[4])?],
            energy: num(fields[5])?,
            temperature: num(fields[6])?,
            entropy: num(fields[7])?,
            rel_entropy: num(fields[8])?,
            fisher: num(fields[9])?,
            l2_error: if fields[10].is_empty() {
                None
            } else {
                Some(num(fields[10])?)
            },
            l2_to_equilibrium: num(fields[11])?,
        });
    }
    Ok(out)
}

/// `v3,f` rows.
pub fn write_slice_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "v3,f").map_err(io)?;
    for &(v, f) in points {
        writeln!(w, "{},{}", fmt_f64(v), fmt_f64(f)).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Name of the cross-section file for time `t`.
pub fn slice_file_name(t: f64) -> String {
    format!("slice_t{t}.csv")
}

/// Spectral state with the step counter it was reached at.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub field: SpectralField,
    pub step: u64,
    pub t: f64,
    pub dt: f64,
}

fn put_f64(buf: &mut Vec<u8>, x: f64) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(buf: &mut Vec<u8>, x: u64) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn fingerprint(buf: &mut Vec<u8>, spec: &TorusSpec) {
    put_f64(buf, spec.radius());
    put_f64(buf, spec.gamma());
    put_u64(buf, spec.n() as u64);
}

/// Cursor over a byte buffer that reports truncation against a path.
struct Reader<'a> {
    bytes: &'a [u8],
    path: &'a Path,
}

impl Reader<'_> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K]> {
        if self.bytes.len() < K {
            return Err(Error::format(self.path, "truncated file"));
        }
        let (head, rest) = self.bytes.split_at(K);
        self.bytes = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn magic(&mut self, expect: &[u8; 8]) -> Result<()> {
        if &self.take::<8>()? != expect {
            return Err(Error::format(self.path, "bad magic"));
        }
        Ok(())
    }

    /// Fails unless the stored `(R, gamma, N)` equals the spec's.
    fn fingerprint(&mut self, spec: &TorusSpec) -> Result<()> {
        let (r, gamma, n) = (self.f64()?, self.f64()?, self.u64()?);
        if r != spec.radius() || gamma != spec.gamma() || n != spec.n() as u64 {
            return Err(Error::format(
                self.path,
                format!(
                    "fingerprint (R={r}, gamma={gamma}, N={n}) does not match (R={}, gamma={}, N={})",
                    spec.radius(),
                    spec.gamma(),
                    spec.n()
                ),
            ));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(Error::format(self.path, "trailing bytes"))
        }
    }
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    open(path)?
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_checkpoint(path: &Path, ck: &Checkpoint) -> Result<()> {
    let coeffs = ck.field.coeffs();
    let mut buf = Vec::with_capacity(64 + 16 * coeffs.len());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    fingerprint(&mut buf, ck.field.spec());
    put_u64(&mut buf, ck.step);
    put_f64(&mut buf, ck.t);
    put_f64(&mut buf, ck.dt);
    for c in coeffs {
        put_f64(&mut buf, c.re);
        put_f64(&mut buf, c.im);
    }
    write_all(path, &buf)
}

/// Reads a checkpoint written for `spec`.
pub fn read_checkpoint(path: &Path, spec: &TorusSpec) -> Result<Checkpoint> {
    let bytes = read_all(path)?;
    let mut r = Reader { bytes: &bytes, path };
    r.magic(CHECKPOINT_MAGIC)?;
    r.fingerprint(spec)?;
    let (step, t, dt) = (r.u64()?, r.f64()?, r.f64()?);
    let mut coeffs = Vec::with_capacity(spec.mode_count());
    for _ in 0..spec.mode_count() {
        coeffs.push(Complex64::new(r.f64()?, r.f64()?));
    }
    r.finish()?;
    let field = SpectralField::from_coeffs(*spec, coeffs)?;
    Ok(Checkpoint { field, step, t, dt })
}

pub fn dump_kernel_table(path: &Path, table: &KernelTable) -> Result<usize> {
    let entries = table.entries();
    let mut buf = Vec::with_capacity(40 + 16 * entries.len());
    buf.extend_from_slice(KERNEL_MAGIC);
    fingerprint(&mut buf, table.spec());
    put_u64(&mut buf, entries.len() as u64);
    for ((a, b), beta) in &entries {
        let narrow = |x: u64| u32::try_from(x).map_err(|_| Error::format(path, "key exceeds u32"));
        buf.extend_from_slice(&narrow(*a)?.to_le_bytes());
        buf.extend_from_slice(&narrow(*b)?.to_le_bytes());
        put_f64(&mut buf, *beta);
    }
    write_all(path, &buf)?;
    Ok(entries.len())
}

/// Loads a dumped table into a fresh table for `spec`. The loaded values
/// are used verbatim; missing ones are computed on demand.
pub fn load_kernel_table(path: &Path, spec: &TorusSpec) -> Result<KernelTable> {
    let bytes = read_all(path)?;
    let mut r = Reader { bytes: &bytes, path };
    r.magic(KERNEL_MAGIC)?;
    r.fingerprint(spec)?;
    let count = r.u64()?;
    let mut table = KernelTable::new(*spec);
    for _ in 0..count {
        let a = r.u32()? as u64;
        let b = r.u32()? as u64;
        table.insert((a, b), r.f64()?);
    }
    r.finish()?;
    Ok(table)
}
