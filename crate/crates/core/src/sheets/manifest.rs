use std::io::Read;
use std::path::Path;

use super::{Pen, SheetError};
use crate::geom::Rect;

/// One manually drawn box on a collection sheet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetBox {
    pub rect: Rect,
    pub forged: bool,
    pub pen: Pen,
    /// 1-based line in the manifest, for error reporting downstream.
    pub line: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetAnnotation {
    /// Sheet image file name, relative to the sheets directory.
    pub sheet_id: String,
    pub person_id: String,
    pub boxes: Vec<SheetBox>,
}

/// Reads a manifest with header
/// `sheet_file,person_id,forged,pen,x,y,w,h`. Records are grouped per sheet in
/// order of first appearance; boxes keep file order.
pub fn load_manifest(path: &Path) -> Result<Vec<SheetAnnotation>, SheetError> {
    let file = std::fs::File::open(path).map_err(|source| SheetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(file)
}

pub fn parse_manifest(reader: impl Read) -> Result<Vec<SheetAnnotation>, SheetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);

    let mut sheets: Vec<SheetAnnotation> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| SheetError::Malformed {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |message: String| SheetError::Malformed { line, message };
        if rec.len() != 8 {
            return Err(malformed(format!("expected 8 fields, found {}", rec.len())));
        }
        let sheet_file = &rec[0];
        let person_id = &rec[1];
        if sheet_file.is_empty() {
            return Err(malformed("empty sheet_file".into()));
        }
        if person_id.is_empty() {
            return Err(malformed("empty person_id".into()));
        }
        let forged = match &rec[2] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(format!("forged must be 0 or 1, got {other:?}"))),
        };
        let pen = Pen::from_code(&rec[3])
            .ok_or_else(|| malformed(format!("pen must be bp or pc, got {:?}", &rec[3])))?;
        let mut nums = [0i64; 4];
        for (i, n) in nums.iter_mut().enumerate() {
            *n = rec[4 + i]
                .parse()
                .map_err(|_| malformed(format!("not an integer: {:?}", &rec[4 + i])))?;
        }
        let [x, y, w, h] = nums;
        if w <= 0 || h <= 0 {
            return Err(malformed(format!("non-positive box size {w}x{h}")));
        }
        let limit = u32::MAX as i64;
        if x < 0 || y < 0 || x + w > limit || y + h > limit {
            return Err(SheetError::RectOutsideBounds { line, x, y, w, h });
        }
        let sheet_box = SheetBox {
            rect: Rect::new(x as u32, y as u32, w as u32, h as u32),
            forged,
            pen,
            line,
        };

        match sheets.iter_mut().find(|s| s.sheet_id == sheet_file) {
            Some(s) => {
                if s.person_id != person_id {
                    return Err(malformed(format!(
                        "sheet {sheet_file} already belongs to person {}, got {person_id}",
                        s.person_id
                    )));
                }
                s.boxes.push(sheet_box);
            }
            None => sheets.push(SheetAnnotation {
                sheet_id: sheet_file.to_string(),
                person_id: person_id.to_string(),
                boxes: vec![sheet_box],
            }),
        }
    }
    Ok(sheets)
}
