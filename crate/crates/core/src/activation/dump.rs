//! ACTD activation dumps.
//!
//! Binary layout (little-endian):
//!
//! | offset | size | field                          |
//! |--------|------|--------------------------------|
//! | 0      | 4    | magic `ACTD`                   |
//! | 4      | 2    | version (u16, currently 1)     |
//! | 6      | 1    | dtype code (1 = f32)           |
//! | 7      | 8    | n_rows (u64)                   |
//! | 15     | 8    | n_cols (u64)                   |
//! | 23     | 4·n  | row-major f32 payload          |
//!
//! Row and column identities live in a companion `<name>.manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::matrix::{ActivationMatrix, GroupLabel, RepresentationId};

pub const MAGIC: &[u8; 4] = b"ACTD";
pub const VERSION: u16 = 1;
pub const DTYPE_F32: u8 = 1;
pub const HEADER_LEN: usize = 23;
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

const OFFSET_VERSION: usize = 4;
const OFFSET_DTYPE: usize = 6;
const OFFSET_ROWS: usize = 7;
const OFFSET_COLS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DumpHeader {
    pub version: u16,
    pub dtype: u8,
    pub n_rows: u64,
    pub n_cols: u64,
}

impl DumpHeader {
    pub fn payload_len(&self) -> Option<u64> {
        self.n_rows.checked_mul(self.n_cols)?.checked_mul(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Eval,
}

/// Companion metadata of a dump. Fields after `reps` are optional so the same
/// schema serves probe activations and labelled downstream embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpManifest {
    pub schema_version: u32,
    pub n_rows: u64,
    pub n_cols: u64,
    pub image_ids: Vec<String>,
    pub reps: Vec<RepresentationId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_classes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl DumpManifest {
    pub fn for_matrix(matrix: &ActivationMatrix) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            n_rows: matrix.n_rows() as u64,
            n_cols: matrix.n_cols() as u64,
            image_ids: matrix.image_ids().to_vec(),
            reps: matrix.reps().to_vec(),
            scenario: matrix.scenario,
            group: matrix.group,
            model: None,
            labels: None,
            n_classes: None,
            split: None,
        }
    }
}

/// `dir/name.actd` -> `dir/name.manifest.json`.
pub fn manifest_path(dump: &Path) -> PathBuf {
    dump.with_extension("manifest.json")
}

pub fn encode(matrix: &ActivationMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + matrix.values().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(DTYPE_F32);
    out.extend_from_slice(&(matrix.n_rows() as u64).to_le_bytes());
    out.extend_from_slice(&(matrix.n_cols() as u64).to_le_bytes());
    for v in matrix.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn le_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

/// Parses and checks the fixed header, including that the payload length
/// agrees with the declared shape.
pub fn decode_header(bytes: &[u8], path: &Path) -> Result<DumpHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            path,
            bytes.len() as u64,
            format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
        ));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::format(path, 0, format!("bad magic {:?}", &bytes[..4])));
    }
    let version = u16::from_le_bytes([bytes[OFFSET_VERSION], bytes[OFFSET_VERSION + 1]]);
    if version != VERSION {
        return Err(Error::format(
            path,
            OFFSET_VERSION as u64,
            format!("unsupported version {version}"),
        ));
    }
    let dtype = bytes[OFFSET_DTYPE];
    if dtype != DTYPE_F32 {
        return Err(Error::format(
            path,
            OFFSET_DTYPE as u64,
            format!("unsupported dtype code {dtype}"),
        ));
    }
    let header = DumpHeader {
        version,
        dtype,
        n_rows: le_u64(bytes, OFFSET_ROWS),
        n_cols: le_u64(bytes, OFFSET_COLS),
    };
    let expected = header.payload_len().ok_or_else(|| {
        Error::format(path, OFFSET_ROWS as u64, "row/column counts overflow")
    })?;
    let actual = (bytes.len() - HEADER_LEN) as u64;
    if actual != expected {
        return Err(Error::format(
            path,
            HEADER_LEN as u64,
            format!(
                "payload is {actual} bytes but header declares {}x{} f32 ({expected} bytes)",
                header.n_rows, header.n_cols
            ),
        ));
    }
    Ok(header)
}

/// Decodes the payload, rejecting non-finite values.
pub fn decode_payload(bytes: &[u8], header: &DumpHeader) -> Result<Vec<f32>> {
    let cols = header.n_cols.max(1) as usize;
    bytes[HEADER_LEN..]
        .chunks_exact(4)
        .enumerate()
        .map(|(i, c)| {
            let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteInput {
                    row: i / cols,
                    col: i % cols,
                })
            }
        })
        .collect()
}

pub fn read_manifest(dump: &Path) -> Result<DumpManifest> {
    let path = manifest_path(dump);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: DumpManifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::Manifest {
            path,
            reason: format!("unsupported schema_version {}", manifest.schema_version),
        });
    }
    Ok(manifest)
}

fn check_manifest(manifest: &DumpManifest, header: &DumpHeader, path: &Path) -> Result<()> {
    let bad = |reason: String| Error::Manifest {
        path: manifest_path(path),
        reason,
    };
    if manifest.n_rows != header.n_rows || manifest.n_cols != header.n_cols {
        return Err(bad(format!(
            "manifest shape {}x{} disagrees with dump header {}x{}",
            manifest.n_rows, manifest.n_cols, header.n_rows, header.n_cols
        )));
    }
    if manifest.image_ids.len() as u64 != header.n_rows {
        return Err(bad(format!(
            "{} image ids for {} rows",
            manifest.image_ids.len(),
            header.n_rows
        )));
    }
    if manifest.reps.len() as u64 != header.n_cols {
        return Err(bad(format!(
            "{} reps for {} columns",
            manifest.reps.len(),
            header.n_cols
        )));
    }
    if let Some(labels) = &manifest.labels {
        if labels.len() as u64 != header.n_rows {
            return Err(bad(format!("{} labels for {} rows", labels.len(), header.n_rows)));
        }
    }
    Ok(())
}

/// Reads a dump and its manifest, validating both.
pub fn read_dump_with_manifest(path: &Path) -> Result<(ActivationMatrix, DumpManifest)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header = decode_header(&bytes, path)?;
    let values = decode_payload(&bytes, &header)?;
    let manifest = read_manifest(path)?;
    check_manifest(&manifest, &header, path)?;
    let mut matrix =
        ActivationMatrix::new(values, manifest.image_ids.clone(), manifest.reps.clone())?;
    matrix.group = manifest.group;
    matrix.scenario = manifest.scenario;
    Ok((matrix, manifest))
}

pub fn read_dump(path: &Path) -> Result<ActivationMatrix> {
    read_dump_with_manifest(path).map(|(m, _)| m)
}

pub fn write_dump_with_manifest(
    matrix: &ActivationMatrix,
    manifest: &DumpManifest,
    path: &Path,
) -> Result<()> {
    let header = DumpHeader {
        version: VERSION,
        dtype: DTYPE_F32,
        n_rows: matrix.n_rows() as u64,
        n_cols: matrix.n_cols() as u64,
    };
    check_manifest(manifest, &header, path)?;
    fs::write(path, encode(matrix)).map_err(|e| Error::io(path, e))?;
    let mpath = manifest_path(path);
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&mpath, text).map_err(|e| Error::io(&mpath, e))
}

pub fn write_dump(matrix: &ActivationMatrix, path: &Path) -> Result<()> {
    write_dump_with_manifest(matrix, &DumpManifest::for_matrix(matrix), path)
}

/// Outcome of checking a dump file without building a matrix from it.
#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub path: PathBuf,
    pub file_len: u64,
    pub header: Option<DumpHeader>,
    pub manifest: bool,
    pub error: Option<String>,
    pub error_offset: Option<u64>,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.error.is_none()
    }
}

pub fn validate(path: &Path) -> Validation {
    let mut v = Validation {
        path: path.to_path_buf(),
        file_len: 0,
        header: None,
        manifest: false,
        error: None,
        error_offset: None,
    };
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            v.error = Some(Error::io(path, e).to_string());
            return v;
        }
    };
    v.file_len = bytes.len() as u64;
    let outcome = decode_header(&bytes, path)
        .and_then(|h| {
            v.header = Some(h);
            decode_payload(&bytes, &h)?;
            let m = read_manifest(path)?;
            check_manifest(&m, &h, path)?;
            Ok(m)
        })
        .and_then(|m| {
            v.manifest = true;
            check_identities(&m)
        });
    if let Err(e) = outcome {
        if let Error::Format { offset, .. } = &e {
            v.error_offset = Some(*offset);
        }
        v.error = Some(e.to_string());
    }
    v
}

fn check_identities(m: &DumpManifest) -> Result<()> {
    let mut ids = std::collections::HashSet::new();
    for id in &m.image_ids {
        if !ids.insert(id) {
            return Err(Error::MismatchedImages(format!("duplicate image id `{id}`")));
        }
    }
    let mut reps = std::collections::HashSet::new();
    for r in &m.reps {
        if !reps.insert((&r.layer_name, r.index)) {
            return Err(Error::MismatchedReps(format!(
                "duplicate representation {}[{}]",
                r.layer_name, r.index
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::matrix::RepKind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ActivationMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..rows * cols)
            .map(|_| f32::from_bits(rng.gen::<u32>()))
            .map(|v| if v.is_finite() { v } else { 1.5 })
            .collect();
        let ids = (0..rows).map(|i| format!("n{i:04}")).collect();
        ActivationMatrix::new(values, ids, RepresentationId::layer("pool", cols, RepKind::Feature))
            .unwrap()
            .with_group(GroupLabel::Stamped)
            .with_scenario(Scenario::Hindi)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.actd");
        let m = random_matrix(10, 16, 3);
        write_dump(&m, &path).unwrap();
        let back = read_dump(&path).unwrap();
        assert_eq!(back.image_ids(), m.image_ids());
        assert_eq!(back.reps(), m.reps());
        assert_eq!(back.group, Some(GroupLabel::Stamped));
        assert_eq!(back.scenario, Some(Scenario::Hindi));
        let a: Vec<u32> = m.values().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u32> = back.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
        assert_eq!(fs::read(&path).unwrap(), encode(&m));
    }

    #[test]
    fn header_bytes_are_exact() {
        let m = random_matrix(2, 3, 0);
        let bytes = encode(&m);
        assert_eq!(&bytes[..4], b"ACTD");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6], 1);
        assert_eq!(&bytes[7..15], &2u64.to_le_bytes());
        assert_eq!(&bytes[15..23], &3u64.to_le_bytes());
        assert_eq!(bytes.len(), 23 + 24);
        assert_eq!(&bytes[23..27], &m.values()[0].to_le_bytes());
    }

    fn offset_of(bytes: &[u8]) -> u64 {
        match decode_header(bytes, Path::new("x")) {
            Err(Error::Format { offset, .. }) => offset,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_headers_name_offsets() {
        let good = encode(&random_matrix(3, 4, 1));
        let mut bad = good.clone();
        bad[1] = b'X';
        assert_eq!(offset_of(&bad), 0);
        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(offset_of(&bad), 4);
        let mut bad = good.clone();
        bad[6] = 2;
        assert_eq!(offset_of(&bad), 6);
        assert_eq!(offset_of(&good[..10]), 10);
        assert_eq!(offset_of(&good[..good.len() - 1]), 23);
        let mut bad = good.clone();
        bad[7..15].copy_from_slice(&u64::MAX.to_le_bytes());
        assert_eq!(offset_of(&bad), 7);
    }

    #[test]
    fn truncated_file_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.actd");
        write_dump(&random_matrix(4, 4, 2), &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 6]).unwrap();
        assert!(matches!(read_dump(&path), Err(Error::Format { offset: 23, .. })));
        let v = validate(&path);
        assert!(!v.passed());
        assert_eq!(v.error_offset, Some(23));
    }

    #[test]
    fn nan_payload_rejected_on_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.actd");
        write_dump(&random_matrix(3, 5, 4), &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        let at = HEADER_LEN + 4 * (5 + 2);
        bytes[at..at + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_dump(&path),
            Err(Error::NonFiniteInput { row: 1, col: 2 })
        ));
        assert!(!validate(&path).passed());
    }

    #[test]
    fn manifest_shape_must_agree() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.actd");
        let m = random_matrix(3, 2, 5);
        write_dump(&m, &path).unwrap();
        let mut manifest = read_manifest(&path).unwrap();
        manifest.image_ids.pop();
        fs::write(manifest_path(&path), serde_json::to_string(&manifest).unwrap()).unwrap();
        assert!(matches!(read_dump(&path), Err(Error::Manifest { .. })));
    }

    #[test]
    fn missing_manifest_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lonely.actd");
        fs::write(&path, encode(&random_matrix(1, 1, 6))).unwrap();
        assert!(matches!(read_dump(&path), Err(Error::Io { .. })));
        assert_eq!(manifest_path(&path), dir.path().join("lonely.manifest.json"));
    }

    proptest! {
        #[test]
        fn header_length_disagreement_always_rejected(
            rows in 0u64..6, cols in 0u64..6, d_rows in 0u64..4, d_cols in 0u64..4,
        ) {
            prop_assume!(d_rows != 0 || d_cols != 0);
            let m = random_matrix(rows as usize, cols as usize, rows * 7 + cols);
            let mut bytes = encode(&m);
            let (r2, c2) = (rows + d_rows, cols + d_cols);
            prop_assume!(r2 * c2 != rows * cols);
            bytes[7..15].copy_from_slice(&r2.to_le_bytes());
            bytes[15..23].copy_from_slice(&c2.to_le_bytes());
            let rejected = matches!(decode_header(&bytes, Path::new("p")), Err(Error::Format { .. }));
            prop_assert!(rejected);
        }
    }
}
