//! JSON decoding with field-path diagnostics.

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Deserialize, reporting failures as [`Error::Schema`] with the JSON path of
/// the offending field plus its line and column.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let location = format!("{path} (line {}, column {})", inner.line(), inner.column());
        Error::schema(location, inner.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;

    #[derive(Debug, serde::Deserialize)]
    struct Doc {
        #[allow(dead_code)]
        boxes: Vec<BBox>,
    }

    #[test]
    fn reports_field_path_and_line() {
        let err = from_str::<Doc>("{\n \"boxes\": [[0,0,1,1],\n [0,0,0,1]]}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("boxes[1]"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }
}
