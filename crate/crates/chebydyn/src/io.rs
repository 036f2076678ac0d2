//! File output: atomic writes, metadata sidecars, CSV and binary formats.
//!
//! Every run artefact is written to a temporary file and renamed into place
//! so failures never leave partial outputs, and each output gets a sidecar
//! `<name>.meta.json` echoing the fully-resolved configuration (seed
//! included) so the identical computation can be replayed.

use crate::cml::{CorrelationSurface, PatternDump, ZeroCrossing};
use crate::density::Histogram;
use crate::Result;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: &str = "1";

/// Writes `bytes` to `path` atomically (temp file + rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp: PathBuf = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Sidecar path for an output file.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes the output and its metadata sidecar.
pub fn write_with_metadata(
    path: &Path,
    bytes: &[u8],
    mut metadata: serde_json::Value,
) -> Result<()> {
    if let Some(obj) = metadata.as_object_mut() {
        obj.insert(
            "format_version".into(),
            serde_json::Value::String(FORMAT_VERSION.into()),
        );
        obj.insert(
            "tool_version".into(),
            serde_json::Value::String(env!("CARGO_PKG_VERSION").into()),
        );
    }
    atomic_write(path, bytes)?;
    atomic_write(&meta_path(path), serde_json::to_string_pretty(&metadata)?.as_bytes())?;
    Ok(())
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_center,density\n");
    for i in 0..h.bins {
        out.push_str(&format!("{},{}\n", h.bin_center(i), h.densities[i]));
    }
    out
}

pub fn surface_csv(s: &CorrelationSurface) -> String {
    let mut out = String::from("c,a,snnc,tnnc,snnc_stderr,tnnc_stderr,ergodicity_flag\n");
    for cell in &s.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            cell.c,
            cell.a,
            cell.snnc,
            cell.tnnc,
            cell.snnc_stderr,
            cell.tnnc_stderr,
            cell.ergodicity_flag as u8
        ));
    }
    out
}

pub fn zeros_csv(zs: &[ZeroCrossing]) -> String {
    let mut out = String::from("a,target,c_star,half_width,noise_limited\n");
    for z in zs {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            z.a,
            z.target.label(),
            z.c_star,
            z.half_width,
            z.noise_limited as u8
        ));
    }
    out
}

/// Binary pattern format: 8-byte header (steps K then sites J, little-endian
/// u32) followed by row-major (time x space) little-endian f32 values.
pub fn pattern_binary(p: &PatternDump) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + p.field.len() * 4);
    out.extend_from_slice(&(p.steps as u32).to_le_bytes());
    out.extend_from_slice(&(p.sites as u32).to_le_bytes());
    for v in &p.field {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn pattern_from_binary(bytes: &[u8]) -> Option<PatternDump> {
    if bytes.len() < 8 {
        return None;
    }
    let steps = u32::from_le_bytes(bytes[0..4].try_into().ok()?) as usize;
    let sites = u32::from_le_bytes(bytes[4..8].try_into().ok()?) as usize;
    let body = &bytes[8..];
    if body.len() != steps * sites * 4 {
        return None;
    }
    let field = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Some(PatternDump { steps, sites, field })
}

pub fn pattern_csv(p: &PatternDump) -> String {
    let mut out = String::with_capacity(p.field.len() * 8);
    for row in p.field.chunks(p.sites) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

impl From<serde_json::Error> for crate::Error {
    fn from(e: serde_json::Error) -> Self {
        crate::Error::Domain(format!("serialization: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_binary_roundtrip() {
        let p = PatternDump {
            steps: 3,
            sites: 2,
            field: vec![0.0, 1.0, -0.5, 0.25, 0.75, -1.0],
        };
        let bytes = pattern_binary(&p);
        assert_eq!(bytes.len(), 8 + 24);
        let back = pattern_from_binary(&bytes).unwrap();
        assert_eq!(back.steps, 3);
        assert_eq!(back.sites, 2);
        assert_eq!(back.field, p.field);
        assert!(pattern_from_binary(&bytes[..7]).is_none());
    }

    #[test]
    fn atomic_write_and_sidecar() {
        let dir = std::env::temp_dir().join(format!("chebydyn-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_with_metadata(&path, b"a,b\n1,2\n", serde_json::json!({"seed": 7}))
            .unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"a,b\n1,2\n");
        let meta: serde_json::Value =
            serde_json::from_slice(&std::fs::read(meta_path(&path)).unwrap()).unwrap();
        assert_eq!(meta["seed"], 7);
        assert_eq!(meta["format_version"], FORMAT_VERSION);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
