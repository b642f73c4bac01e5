//! JSON instance files.
//!
//! Layout: `{"canvas": {"width", "height"}, "separation": {"sep_abs",
//! "sep_pct"}, "items": [{"id", "class_label", "base_width", "base_height",
//! "anchor": {"x", "y"}}]}`. Field order is fixed by the struct declarations
//! and floats are written in shortest round-trip form.

use super::{validate_instance, InstanceError, RarpInstance};
use std::fs;
use std::path::Path;

pub fn to_json(instance: &RarpInstance) -> String {
    let mut s = serde_json::to_string_pretty(instance).expect("instance serializes");
    s.push('\n');
    s
}

/// Parses without validating.
pub fn parse_instance(text: &str, source_name: &str) -> Result<RarpInstance, InstanceError> {
    serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_instance_unchecked(path: &Path) -> Result<RarpInstance, InstanceError> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text, &path.display().to_string())
}

/// Reads and validates an instance file.
pub fn read_instance(path: &Path) -> Result<RarpInstance, InstanceError> {
    let instance = read_instance_unchecked(path)?;
    let violations = validate_instance(&instance);
    if violations.is_empty() {
        Ok(instance)
    } else {
        Err(InstanceError::Validation(violations))
    }
}

pub fn write_instance(instance: &RarpInstance, path: &Path) -> Result<(), InstanceError> {
    crate::write_atomic(path, to_json(instance).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::instance::{CanvasSpec, ItemSpec, SeparationSpec};

    fn sample() -> RarpInstance {
        RarpInstance::new(
            CanvasSpec::new(640.0, 480.0),
            SeparationSpec::new(5.0, 0.02),
            vec![
                ItemSpec::new(0, "scratch", 31.25, 12.0, Point2::new(100.1, 200.2)),
                ItemSpec::new(1, "hole", 7.0, 7.5, Point2::new(300.0, 50.000000001)),
            ],
        )
    }

    #[test]
    fn field_order_is_fixed() {
        let json = to_json(&sample());
        let canvas = json.find("\"canvas\"").unwrap();
        let sep = json.find("\"separation\"").unwrap();
        let items = json.find("\"items\"").unwrap();
        assert!(canvas < sep && sep < items);
        let id = json.find("\"id\"").unwrap();
        let label = json.find("\"class_label\"").unwrap();
        let anchor = json.find("\"anchor\"").unwrap();
        assert!(id < label && label < anchor);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i.json");
        write_instance(&sample(), &path).unwrap();
        assert_eq!(read_instance(&path).unwrap(), sample());
    }

    #[test]
    fn parse_error_has_position() {
        let err = parse_instance("{\n  \"canvas\": {\"width\": 1.0,\n  \"height\": \"x\"}}", "t.json").unwrap_err();
        match err {
            InstanceError::Parse { line, source_name, .. } => {
                assert_eq!(line, 3);
                assert_eq!(source_name, "t.json");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_instance_is_rejected_on_read() {
        let mut bad = sample();
        bad.items[1].anchor = bad.items[0].anchor;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        write_instance(&bad, &path).unwrap();
        assert!(matches!(read_instance(&path), Err(InstanceError::Validation(v)) if v.len() == 1));
        assert!(read_instance_unchecked(&path).is_ok());
    }
}
