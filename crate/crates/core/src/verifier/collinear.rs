use super::VerifyError;
use crate::instance::RarpInstance;
use crate::solver::ScaleSolution;
use serde::{Deserialize, Serialize};

/// Residuals of the three-boxes-on-a-horizontal-line system.
///
/// With items ordered left to right, widths `b, d, f` and scales
/// `alpha, beta, gamma`, both neighbor pairs touch iff
/// `b*alpha/2 + d*beta + f*gamma/2 = c3 - c1`, and the total width fits iff
/// `b*alpha + d*beta + f*gamma <= W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollinearResiduals {
    /// Zero when both pairs touch; negative when there is a gap.
    pub touching_residual: f64,
    /// Non-negative when the summed widths fit in the canvas width.
    pub width_slack: f64,
}

pub fn collinear_residuals(instance: &RarpInstance, solution: &ScaleSolution) -> Result<CollinearResiduals, VerifyError> {
    let items = &instance.items;
    if items.len() != 3 {
        return Err(VerifyError::Shape(format!("expected 3 items, found {}", items.len())));
    }
    if solution.scales.len() != 3 {
        return Err(VerifyError::Shape(format!("expected 3 scales, found {}", solution.scales.len())));
    }
    let y = items[0].anchor.y;
    if items.iter().any(|it| it.anchor.y != y) {
        return Err(VerifyError::Shape("anchors are not on one horizontal line".into()));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| items[i].anchor.x.total_cmp(&items[j].anchor.x));
    let [l, m, r] = order;
    if items[l].anchor.x == items[m].anchor.x || items[m].anchor.x == items[r].anchor.x {
        return Err(VerifyError::Shape("anchors are not distinct".into()));
    }
    let (b, d, f) = (items[l].base_width, items[m].base_width, items[r].base_width);
    let (alpha, beta, gamma) = (solution.scales[l], solution.scales[m], solution.scales[r]);
    let span = items[r].anchor.x - items[l].anchor.x;
    Ok(CollinearResiduals {
        touching_residual: 0.5 * b * alpha + d * beta + 0.5 * f * gamma - span,
        width_slack: instance.canvas.width - (b * alpha + d * beta + f * gamma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::instance::{CanvasSpec, ItemSpec, SeparationSpec};

    fn fixture() -> RarpInstance {
        RarpInstance::new(
            CanvasSpec::new(40.0, 20.0),
            SeparationSpec::default(),
            vec![
                ItemSpec::new(0, "a", 2.0, 3.0, Point2::new(10.0, 10.0)),
                ItemSpec::new(1, "b", 4.0, 2.0, Point2::new(16.0, 10.0)),
                ItemSpec::new(2, "c", 6.0, 4.0, Point2::new(26.0, 10.0)),
            ],
        )
    }

    #[test]
    fn touching_scales_have_zero_residual() {
        // pair scales: 6 / 3 = 2 and 10 / 5 = 2
        let r = collinear_residuals(&fixture(), &ScaleSolution::from_scales(vec![2.0, 2.0, 2.0])).unwrap();
        assert_eq!(r.touching_residual, 0.0);
        assert_eq!(r.width_slack, 16.0);
    }

    #[test]
    fn residual_moves_with_scale() {
        let half = collinear_residuals(&fixture(), &ScaleSolution::from_scales(vec![1.0, 1.0, 1.0])).unwrap();
        assert!(half.touching_residual < 0.0);
        assert!(half.width_slack > 16.0);
        let big = collinear_residuals(&fixture(), &ScaleSolution::from_scales(vec![4.0, 4.0, 4.0])).unwrap();
        assert!(big.touching_residual > 0.0);
        assert!(big.width_slack < 0.0);
    }

    #[test]
    fn order_of_items_does_not_matter() {
        let mut inst = fixture();
        inst.items.reverse();
        for (k, it) in inst.items.iter_mut().enumerate() {
            it.id = k;
        }
        let r = collinear_residuals(&inst, &ScaleSolution::from_scales(vec![2.0, 2.0, 2.0])).unwrap();
        assert_eq!(r.touching_residual, 0.0);
    }

    #[test]
    fn rejects_other_shapes() {
        let mut inst = fixture();
        inst.items[1].anchor.y = 11.0;
        assert!(matches!(
            collinear_residuals(&inst, &ScaleSolution::from_scales(vec![1.0; 3])),
            Err(VerifyError::Shape(_))
        ));
        inst.items.pop();
        assert!(collinear_residuals(&inst, &ScaleSolution::from_scales(vec![1.0; 2])).is_err());
    }
}
