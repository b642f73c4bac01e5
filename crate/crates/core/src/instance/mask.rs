use super::{CanvasSpec, InstanceError};
use crate::geometry::Point2;

/// Row-major binary foreground mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMask {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl BoolMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<bool>) -> Result<Self, InstanceError> {
        if cells.len() != width * height {
            return Err(InstanceError::InvalidParameter(format!(
                "mask {width}x{height} needs {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Self { width, height, cells })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.cells[y * self.width + x] = value;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnugCanvas {
    pub canvas: CanvasSpec,
    /// Top-left cell of the bounding box in the source grid.
    pub offset: Point2,
}

/// Tight bounding box of the foreground cells, used as the canvas when the
/// object does not fill its image.
pub fn snug_canvas_from_mask(mask: &BoolMask) -> Result<SnugCanvas, InstanceError> {
    let mut bounds: Option<(usize, usize, usize, usize)> = None;
    for y in 0..mask.height {
        for x in 0..mask.width {
            if !mask.get(x, y) {
                continue;
            }
            bounds = Some(match bounds {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
    }
    let (x0, y0, x1, y1) = bounds.ok_or(InstanceError::EmptyMask)?;
    Ok(SnugCanvas {
        canvas: CanvasSpec::new((x1 - x0 + 1) as f64, (y1 - y0 + 1) as f64),
        offset: Point2::new(x0 as f64, y0 as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mask() {
        let m = BoolMask::from_cells(10, 8, vec![true; 80]).unwrap();
        let s = snug_canvas_from_mask(&m).unwrap();
        assert_eq!(s.canvas, CanvasSpec::new(10.0, 8.0));
        assert_eq!(s.offset, Point2::new(0.0, 0.0));
    }

    #[test]
    fn single_cell() {
        let mut m = BoolMask::new(10, 10);
        m.set(3, 4, true);
        let s = snug_canvas_from_mask(&m).unwrap();
        assert_eq!(s.canvas, CanvasSpec::new(1.0, 1.0));
        assert_eq!(s.offset, Point2::new(3.0, 4.0));
    }

    #[test]
    fn l_shape() {
        let mut m = BoolMask::new(12, 12);
        for y in 2..9 {
            m.set(3, y, true);
        }
        for x in 3..7 {
            m.set(x, 8, true);
        }
        // scan for extremes independently
        let fg: Vec<(usize, usize)> = (0..12)
            .flat_map(|y| (0..12).map(move |x| (x, y)))
            .filter(|&(x, y)| m.get(x, y))
            .collect();
        let x0 = fg.iter().map(|p| p.0).min().unwrap();
        let x1 = fg.iter().map(|p| p.0).max().unwrap();
        let y0 = fg.iter().map(|p| p.1).min().unwrap();
        let y1 = fg.iter().map(|p| p.1).max().unwrap();
        let s = snug_canvas_from_mask(&m).unwrap();
        assert_eq!(s.canvas, CanvasSpec::new((x1 - x0 + 1) as f64, (y1 - y0 + 1) as f64));
        assert_eq!(s.canvas, CanvasSpec::new(4.0, 7.0));
        assert_eq!(s.offset, Point2::new(3.0, 2.0));
    }

    #[test]
    fn empty_mask_errors() {
        assert!(matches!(snug_canvas_from_mask(&BoolMask::new(4, 4)), Err(InstanceError::EmptyMask)));
    }
}
