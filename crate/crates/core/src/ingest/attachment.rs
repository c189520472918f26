use sha2::{Digest, Sha256};

use super::IngestError;
use crate::model::{Attachment, AttachmentKind};

fn media_type(filename: &str) -> &'static str {
    let ext = filename.rsplit_once('.').map(|(_, e)| e.to_ascii_lowercase()).unwrap_or_default();
    match ext.as_str() {
        "pdf" => "application/pdf",
        "png" => "image/png",
        "jpg" | "jpeg" => "image/jpeg",
        "tif" | "tiff" => "image/tiff",
        "txt" | "log" => "text/plain",
        "csv" => "text/csv",
        "ags" => "text/plain",
        _ => "application/octet-stream",
    }
}

/// Describes a file by content. Persisting the bytes is the store's job.
pub fn register_attachment(bytes: &[u8], filename: &str, kind: AttachmentKind) -> Result<Attachment, IngestError> {
    if bytes.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    Ok(Attachment {
        filename: filename.to_string(),
        media_type: media_type(filename).to_string(),
        byte_size: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(bytes)),
        kind,
    })
}
