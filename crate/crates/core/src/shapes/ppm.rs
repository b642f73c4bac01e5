//! Palette files and PPM encoding.

use super::{MaskImage, ShapeError};
use indexmap::IndexMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PpmFormat {
    /// Plain text, one image row per line.
    #[default]
    P3,
    /// Binary.
    P6,
}

/// Ordered `label -> rgb` map; class index `k` is the `k`-th entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub entries: IndexMap<String, [u8; 3]>,
}

const CITYSCAPES: [(&str, [u8; 3]); 20] = [
    ("background", [0, 0, 0]),
    ("road", [128, 64, 128]),
    ("sidewalk", [244, 35, 232]),
    ("building", [70, 70, 70]),
    ("wall", [102, 102, 156]),
    ("fence", [190, 153, 153]),
    ("pole", [153, 153, 153]),
    ("traffic light", [250, 170, 30]),
    ("traffic sign", [220, 220, 0]),
    ("vegetation", [107, 142, 35]),
    ("terrain", [152, 251, 152]),
    ("sky", [70, 130, 180]),
    ("person", [220, 20, 60]),
    ("rider", [255, 0, 0]),
    ("car", [0, 0, 142]),
    ("truck", [0, 0, 70]),
    ("bus", [0, 60, 100]),
    ("train", [0, 80, 100]),
    ("motorcycle", [0, 0, 230]),
    ("bicycle", [119, 11, 32]),
];

impl Default for Palette {
    fn default() -> Self {
        Self {
            entries: CITYSCAPES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl Palette {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn color(&self, index: u32) -> Result<[u8; 3], ShapeError> {
        self.entries
            .get_index(index as usize)
            .map(|(_, c)| *c)
            .ok_or(ShapeError::Palette {
                index,
                size: self.len(),
            })
    }

    /// Class index for a label, if present.
    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.entries.get_index_of(label).map(|i| i as u32)
    }

    pub fn from_json(text: &str) -> Result<Self, ShapeError> {
        let entries: IndexMap<String, [u8; 3]> =
            serde_json::from_str(text).map_err(|e| ShapeError::PaletteFile(e.to_string()))?;
        if entries.is_empty() {
            return Err(ShapeError::PaletteFile("palette is empty".into()));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ShapeError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("palette serializes");
        s.push('\n');
        s
    }
}

pub fn mask_to_ppm(mask: &MaskImage, palette: &Palette, format: PpmFormat) -> Result<Vec<u8>, ShapeError> {
    let colors: Vec<[u8; 3]> = mask.cells.iter().map(|&c| palette.color(c)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    match format {
        PpmFormat::P3 => {
            out.extend_from_slice(format!("P3\n{} {}\n255\n", mask.width, mask.height).as_bytes());
            for row in colors.chunks(mask.width.max(1)) {
                let line: Vec<String> = row.iter().map(|[r, g, b]| format!("{r} {g} {b}")).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PpmFormat::P6 => {
            out.extend_from_slice(format!("P6\n{} {}\n255\n", mask.width, mask.height).as_bytes());
            out.extend(colors.iter().flatten());
        }
    }
    Ok(out)
}

pub fn write_mask(mask: &MaskImage, palette: &Palette, path: &Path, format: PpmFormat) -> Result<(), ShapeError> {
    let bytes = mask_to_ppm(mask, palette, format)?;
    crate::write_atomic(path, &bytes)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    /// Maps colors back to class indices (first palette entry wins on
    /// duplicate colors).
    pub fn to_mask(&self, palette: &Palette) -> Result<MaskImage, ShapeError> {
        let cells = self
            .pixels
            .iter()
            .map(|px| {
                palette
                    .entries
                    .values()
                    .position(|c| c == px)
                    .map(|i| i as u32)
                    .ok_or_else(|| ShapeError::Ppm(format!("color {px:?} not in palette")))
            })
            .collect::<Result<_, _>>()?;
        Ok(MaskImage {
            width: self.width,
            height: self.height,
            cells,
        })
    }
}

/// Parses P3 or P6 data with maxval 255. Comments are not supported.
pub fn read_ppm(bytes: &[u8]) -> Result<RgbImage, ShapeError> {
    let bad = |m: &str| ShapeError::Ppm(m.to_string());
    let mut pos = 0;
    let mut token = || -> Result<&[u8], ShapeError> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("unexpected end of data"));
        }
        Ok(&bytes[start..pos])
    };
    let number = |t: &[u8]| -> Result<usize, ShapeError> {
        std::str::from_utf8(t)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("expected a number"))
    };
    let magic = token()?.to_vec();
    let width = number(token()?)?;
    let height = number(token()?)?;
    if number(token()?)? != 255 {
        return Err(bad("maxval must be 255"));
    }
    let count = width * height;
    let pixels = match magic.as_slice() {
        b"P3" => {
            let mut px = Vec::with_capacity(count);
            for _ in 0..count {
                let mut c = [0u8; 3];
                for v in &mut c {
                    let n = number(token()?)?;
                    *v = u8::try_from(n).map_err(|_| bad("sample above 255"))?;
                }
                px.push(c);
            }
            if token().is_ok() {
                return Err(bad("trailing data"));
            }
            px
        }
        b"P6" => {
            let data = bytes.get(pos + 1..).ok_or_else(|| bad("missing raster"))?;
            if data.len() != 3 * count {
                return Err(bad("raster length mismatch"));
            }
            data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
        }
        _ => return Err(bad("unknown magic")),
    };
    Ok(RgbImage { width, height, pixels })
}
