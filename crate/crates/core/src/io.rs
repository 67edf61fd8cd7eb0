//! Volume files, PGM frame import, solver configuration files and plain
//! text vectors.
//!
//! A volume file is a 21-byte header followed by the payload in mode-1
//! order:
//!
//! ```text
//! offset 0   8 bytes  magic "TVHOVOL1"
//! offset 8   u32 LE   m
//! offset 12  u32 LE   n
//! offset 16  u32 LE   N
//! offset 20  u8       dtype: 0 = f64 LE, 1 = u8
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use crate::derivative::BoundaryCondition;
use crate::error::{Error, Result};
use crate::solver::SolverConfig;
use crate::tensor::VideoTensor;

pub const MAGIC: &[u8; 8] = b"TVHOVOL1";
pub const HEADER_LEN: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F64,
    U8,
}

impl Dtype {
    fn code(self) -> u8 {
        match self {
            Dtype::F64 => 0,
            Dtype::U8 => 1,
        }
    }

    fn size(self) -> usize {
        match self {
            Dtype::F64 => 8,
            Dtype::U8 => 1,
        }
    }
}

/// Rounds half away from zero and clamps to `[0, 255]`.
pub fn quantize_u8(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}

pub fn encode_volume(f: &VideoTensor, dtype: Dtype) -> Result<Vec<u8>> {
    let (m, n, nf) = f.shape();
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("dimension {v} exceeds u32")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN + f.len() * dtype.size());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&dim(m)?.to_le_bytes());
    out.extend_from_slice(&dim(n)?.to_le_bytes());
    out.extend_from_slice(&dim(nf)?.to_le_bytes());
    out.push(dtype.code());
    match dtype {
        Dtype::F64 => f.as_slice().iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        Dtype::U8 => out.extend(f.as_slice().iter().map(|&v| quantize_u8(v))),
    }
    Ok(out)
}

pub fn decode_volume(bytes: &[u8], path: &Path) -> Result<VideoTensor> {
    if bytes.len() < 8 || &bytes[..8] != MAGIC {
        return Err(Error::BadMagic { path: path.into() });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            path: path.into(),
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let dim = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let (m, n, nf) = (dim(8), dim(12), dim(16));
    let dtype = match bytes[20] {
        0 => Dtype::F64,
        1 => Dtype::U8,
        other => {
            return Err(Error::BadDtype {
                path: path.into(),
                dtype: other,
            })
        }
    };
    let expected = m
        .checked_mul(n)
        .and_then(|v| v.checked_mul(nf))
        .and_then(|v| v.checked_mul(dtype.size()))
        .and_then(|v| v.checked_add(HEADER_LEN))
        .ok_or(Error::SizeOverflow {
            path: path.into(),
            offset: 8,
        })?;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            path: path.into(),
            expected,
            actual: bytes.len(),
        });
    }
    let payload = &bytes[HEADER_LEN..expected];
    let data = match dtype {
        Dtype::F64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect(),
        Dtype::U8 => payload.iter().map(|&v| v as f64).collect(),
    };
    VideoTensor::from_vec(m, n, nf, data)
}

pub fn write_volume(path: impl AsRef<Path>, f: &VideoTensor, dtype: Dtype) -> Result<()> {
    fs::write(path, encode_volume(f, dtype)?)?;
    Ok(())
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<VideoTensor> {
    let path = path.as_ref();
    decode_volume(&fs::read(path)?, path)
}

/// Parses a binary (P5) PGM with maxval 255 into `(rows, cols, pixels)`,
/// pixels in row-major order.
pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |reason: &str| Error::BadPgm {
        path: path.into(),
        reason: reason.into(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("not a binary P5 PGM"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed header"))?;
    }
    let [cols, rows, maxval] = fields;
    if maxval != 255 {
        return Err(bad(&format!("maxval {maxval} is not supported, only 255")));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("malformed header"));
    }
    pos += 1;
    let need = rows * cols;
    if bytes.len() - pos < need {
        return Err(bad(&format!(
            "expected {need} pixel bytes, found {}",
            bytes.len() - pos
        )));
    }
    Ok((rows, cols, bytes[pos..pos + need].to_vec()))
}

pub fn encode_pgm(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Reads every `.pgm` file in `dir`, in lexicographic order, as one frame.
pub fn import_frames(dir: impl AsRef<Path>) -> Result<VideoTensor> {
    let dir = dir.as_ref();
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    files.sort();
    let Some(first) = files.first().cloned() else {
        return Err(Error::EmptyFrameDirectory(dir.into()));
    };
    let mut dims = None;
    let mut data = Vec::new();
    for path in &files {
        let (rows, cols, px) = parse_pgm(&fs::read(path)?, path)?;
        match dims {
            None => dims = Some((rows, cols)),
            Some(d) if d != (rows, cols) => {
                return Err(Error::MixedFrameSizes {
                    first: first.clone(),
                    first_dims: d,
                    second: path.clone(),
                    second_dims: (rows, cols),
                })
            }
            _ => {}
        }
        // PGM is row-major; volumes are column-major within a frame
        for j in 0..cols {
            for i in 0..rows {
                data.push(px[i * cols + j] as f64);
            }
        }
    }
    let (m, n) = dims.expect("at least one frame");
    VideoTensor::from_vec(m, n, files.len(), data)
}

/// Newline-separated reals; blank lines and `#` comments are skipped.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| {
            l.parse::<f64>().map_err(|_| Error::Config {
                line,
                reason: format!("`{l}` is not a number"),
            })
        })
        .collect()
}

/// One value per line with 17 significant digits.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::with_capacity(v.len() * 24);
    for x in v {
        out.push_str(&format!("{x:.16e}\n"));
    }
    out
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    fs::write(path, format_vector(v))?;
    Ok(())
}

/// Parses a `key = value` solver configuration on top of `base`.
/// Blank lines and `#` comments are ignored; unknown keys are errors.
pub fn parse_config(text: &str, base: &SolverConfig) -> Result<SolverConfig> {
    let mut cfg = base.clone();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Config { line, reason };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let real = || value.parse::<f64>().map_err(|_| err(format!("{key}: `{value}` is not a number")));
        let int = || value.parse::<usize>().map_err(|_| err(format!("{key}: `{value}` is not an integer")));
        let bc = || value.parse::<BoundaryCondition>().map_err(|e| err(e.to_string()));
        match key {
            "c1" => cfg.c[0] = real()?,
            "c2" => cfg.c[1] = real()?,
            "c3" => cfg.c[2] = real()?,
            "mu1" => cfg.mu[0] = real()?,
            "mu2" => cfg.mu[1] = real()?,
            "mu3" => cfg.mu[2] = real()?,
            "rho" => cfg.rho = real()?,
            "eps" => cfg.eps = real()?,
            "max_iter" => cfg.max_iter = int()?,
            "tv" => cfg.tv = value.parse().map_err(|e: Error| err(e.to_string()))?,
            "bc_x" => cfg.bcs[0] = bc()?,
            "bc_y" => cfg.bcs[1] = bc()?,
            "bc_t" => cfg.bcs[2] = bc()?,
            "kernel_length" => cfg.kernel_length = int()?,
            "kernel_accuracy" => cfg.kernel_accuracy = int()?,
            "dt_x" => cfg.dts[0] = real()?,
            "dt_y" => cfg.dts[1] = real()?,
            "dt_t" => cfg.dts[2] = real()?,
            "wavelet" => cfg.wavelet = value.parse().map_err(|e: Error| err(e.to_string()))?,
            "wavelet_levels" => cfg.wavelet_levels = int()?,
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Inverse of [`parse_config`].
pub fn format_config(cfg: &SolverConfig) -> String {
    let wavelet = match cfg.wavelet {
        crate::transforms::WaveletFamily::Haar => "haar",
        crate::transforms::WaveletFamily::Symmlet10 => "symmlet10",
    };
    format!(
        "c1 = {}\nc2 = {}\nc3 = {}\nmu1 = {}\nmu2 = {}\nmu3 = {}\nrho = {}\neps = {}\nmax_iter = {}\ntv = {}\nbc_x = {}\nbc_y = {}\nbc_t = {}\nkernel_length = {}\nkernel_accuracy = {}\ndt_x = {}\ndt_y = {}\ndt_t = {}\nwavelet = {}\nwavelet_levels = {}\n",
        cfg.c[0], cfg.c[1], cfg.c[2], cfg.mu[0], cfg.mu[1], cfg.mu[2], cfg.rho, cfg.eps, cfg.max_iter,
        cfg.tv, cfg.bcs[0], cfg.bcs[1], cfg.bcs[2], cfg.kernel_length, cfg.kernel_accuracy,
        cfg.dts[0], cfg.dts[1], cfg.dts[2], wavelet, cfg.wavelet_levels
    )
}
