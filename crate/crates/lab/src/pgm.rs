//! Binary greymap (P5) reading and writing, 8-bit only.
//!
//! Headers may contain `#` comments and arbitrary whitespace between fields.
//! Written files always use the canonical header `P5\n<w> <h>\n255\n`.

use std::path::Path;

use requant_core::Plane;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("not a binary PGM (magic must be P5)")]
    BadMagic,
    #[error("malformed PGM header")]
    BadHeader,
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u32),
    #[error("PGM dimensions must be positive")]
    EmptyImage,
    #[error("PGM pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::BadHeader)
    }
}

pub fn decode(data: &[u8]) -> Result<Plane, PgmError> {
    if !data.starts_with(b"P5") {
        return Err(PgmError::BadMagic);
    }
    let mut cur = Cursor { data, pos: 2 };
    if !cur
        .data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::BadMagic);
    }
    let width = cur.number()? as usize;
    let height = cur.number()? as usize;
    let maxval = cur.number()?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    if !cur.data.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::BadHeader);
    }
    cur.pos += 1;
    if width == 0 || height == 0 {
        return Err(PgmError::EmptyImage);
    }
    let expected = width * height;
    let raster = &data[cur.pos..];
    if raster.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            found: raster.len(),
        });
    }
    Plane::new(width, height, raster[..expected].to_vec()).map_err(|_| PgmError::BadHeader)
}

pub fn encode(plane: &Plane) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", plane.width(), plane.height());
    let mut out = Vec::with_capacity(header.len() + plane.samples().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(plane.samples());
    out
}

pub fn read(path: &Path) -> crate::Result<Plane> {
    let data = std::fs::read(path).map_err(|source| crate::LabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(decode(&data)?)
}
