use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use super::{Dataset, DatasetError, DatasetFile};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: &str = "indsys-1";

fn parse<S: Scalar>(text: &str) -> Result<DatasetFile<S>, DatasetError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        DatasetError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

/// Parses and resolves a dataset document.
pub fn load_dataset_from_str<S: Scalar>(text: &str) -> Result<Dataset<S>, DatasetError> {
    Dataset::new(parse(text)?)
}

pub fn load_dataset_from_reader<S: Scalar, R: Read>(mut reader: R) -> Result<Dataset<S>, DatasetError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    load_dataset_from_str(&text)
}

pub fn load_dataset<S: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<S>, DatasetError> {
    load_dataset_from_reader(BufReader::new(File::open(path)?))
}

/// Writes the dataset as pretty-printed JSON with a trailing newline.
pub fn save_dataset<S: Scalar, W: Write>(dataset: &Dataset<S>, mut writer: W) -> Result<(), DatasetError> {
    serde_json::to_writer_pretty(&mut writer, dataset.file()).map_err(std::io::Error::from)?;
    writer.write_all(b"\n")?;
    Ok(())
}
