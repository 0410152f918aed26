//! On-disk formats for meshes, flow maps, neighbor lists and FTLE fields.
//!
//! Every binary file is a sequence of blocks. A block is a 24-byte
//! little-endian header followed by its payload:
//!
//! | bytes | field                                             |
//! |-------|---------------------------------------------------|
//! | 0..4  | magic `FTLE`                                      |
//! | 4..8  | `u32` version, always 1                           |
//! | 8..12 | `u32` kind (see [`BlockKind`])                    |
//! | 12..16| `u32` dim (1 for scalar fields)                   |
//! | 16..24| `u64` record count                                |
//!
//! Payloads: coords and flow maps are `count × dim` `f64`; faces are
//! `count × (dim+1)` `i32`; neighbor lists are `count × 2·dim` `i32`;
//! fields are `count` `f64`. A mesh file holds a coords block followed by a
//! faces block; the other files hold a single block.
//!
//! The CSV variant writes the same header as a record
//! (`FTLE,1,<kind>,<dim>,<count>`) followed by one line per record with
//! the binary column order. Blank lines and text after `#` are ignored.
//! Fields are written as plain `index,value` lines with `nan` for
//! undefined values.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Location, Result};
use crate::field::FtleField;
use crate::mesh::{check_face, Dim, FlowMap, SimplicialMesh, MAX_POINTS};
use crate::neighbors::NeighborList;

pub const MAGIC: &[u8; 4] = b"FTLE";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
pub enum BlockKind {
    Coords = 0,
    Faces = 1,
    FlowMap = 2,
    Neighbors = 3,
    Field = 4,
}

impl BlockKind {
    fn name(self) -> &'static str {
        match self {
            BlockKind::Coords => "coords",
            BlockKind::Faces => "faces",
            BlockKind::FlowMap => "flowmap",
            BlockKind::Neighbors => "neighbors",
            BlockKind::Field => "field",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Binary,
    Csv,
}

impl Format {
    /// `.csv` files are CSV, everything else is binary.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Binary,
        }
    }
}

// ---------------------------------------------------------------------------
// Public load/save API
// ---------------------------------------------------------------------------

pub fn load_mesh(path: impl AsRef<Path>, format: Format) -> Result<SimplicialMesh> {
    let bytes = fs::read(path)?;
    match format {
        Format::Binary => decode_mesh(&bytes),
        Format::Csv => parse_mesh(&utf8(&bytes)?),
    }
}

pub fn save_mesh(path: impl AsRef<Path>, mesh: &SimplicialMesh, format: Format) -> Result<()> {
    let bytes = match format {
        Format::Binary => encode_mesh(mesh),
        Format::Csv => render_mesh(mesh).into_bytes(),
    };
    write_file(path.as_ref(), &bytes)
}

/// Loads flow-map values; the horizon is not stored on disk.
pub fn load_flowmap(path: impl AsRef<Path>, format: Format, t_horizon: f64) -> Result<FlowMap> {
    let bytes = fs::read(path)?;
    let (dim, values) = match format {
        Format::Binary => {
            let mut r = BinReader::new(&bytes);
            let (dim, count) = r.dim_header(BlockKind::FlowMap)?;
            let values = r.f64s(count, dim.get())?;
            r.finish()?;
            (dim, values)
        }
        Format::Csv => {
            let text = utf8(&bytes)?;
            let mut r = CsvReader::new(&text);
            let (dim, count) = r.dim_header(BlockKind::FlowMap)?;
            let values = r.f64_rows(count, dim.get())?;
            r.finish()?;
            (dim, values)
        }
    };
    FlowMap::new(dim, values, t_horizon)
}

pub fn save_flowmap(path: impl AsRef<Path>, fm: &FlowMap, format: Format) -> Result<()> {
    let bytes = match format {
        Format::Binary => {
            let mut out = Vec::new();
            put_f64_block(&mut out, BlockKind::FlowMap, fm.dim().get(), fm.values());
            out
        }
        Format::Csv => {
            let mut out = String::new();
            put_csv_f64_block(&mut out, BlockKind::FlowMap, fm.dim().get(), fm.values());
            out.into_bytes()
        }
    };
    write_file(path.as_ref(), &bytes)
}

pub fn load_neighbors(path: impl AsRef<Path>, format: Format) -> Result<NeighborList> {
    let bytes = fs::read(path)?;
    let (dim, entries) = match format {
        Format::Binary => {
            let mut r = BinReader::new(&bytes);
            let (dim, count) = r.dim_header(BlockKind::Neighbors)?;
            let entries = r.i32s(count, dim.slots())?;
            r.finish()?;
            (dim, entries)
        }
        Format::Csv => {
            let text = utf8(&bytes)?;
            let mut r = CsvReader::new(&text);
            let (dim, count) = r.dim_header(BlockKind::Neighbors)?;
            let entries = r.i32_rows(count, dim.slots())?;
            r.finish()?;
            (dim, entries)
        }
    };
    NeighborList::from_entries(dim, entries)
}

pub fn save_neighbors(path: impl AsRef<Path>, nl: &NeighborList, format: Format) -> Result<()> {
    let bytes = match format {
        Format::Binary => encode_neighbors(nl),
        Format::Csv => {
            let mut out = String::new();
            put_csv_i32_block(
                &mut out,
                BlockKind::Neighbors,
                nl.dim().get(),
                nl.dim().slots(),
                nl.entries(),
            );
            out.into_bytes()
        }
    };
    write_file(path.as_ref(), &bytes)
}

pub fn load_field(path: impl AsRef<Path>, format: Format) -> Result<FtleField> {
    let bytes = fs::read(path)?;
    match format {
        Format::Binary => {
            let mut r = BinReader::new(&bytes);
            let h = r.header(BlockKind::Field)?;
            if h.dim != 1 {
                return Err(Error::UnsupportedDim {
                    dim: u64::from(h.dim),
                    at: Some(Location::Offset(12)),
                });
            }
            let values = r.f64s(h.count, 1)?;
            r.finish()?;
            Ok(FtleField::new(values))
        }
        Format::Csv => parse_field(&utf8(&bytes)?),
    }
}

pub fn save_field(path: impl AsRef<Path>, field: &FtleField, format: Format) -> Result<()> {
    let bytes = match format {
        Format::Binary => encode_field(field),
        Format::Csv => render_field(field).into_bytes(),
    };
    write_file(path.as_ref(), &bytes)
}

// ---------------------------------------------------------------------------
// Binary encoding
// ---------------------------------------------------------------------------

pub fn encode_mesh(mesh: &SimplicialMesh) -> Vec<u8> {
    let d = mesh.dim().get();
    let mut out = Vec::with_capacity(2 * HEADER_LEN + mesh.coords().len() * 8 + mesh.face_indexes().len() * 4);
    put_f64_block(&mut out, BlockKind::Coords, d, mesh.coords());
    put_header(&mut out, BlockKind::Faces, d as u32, mesh.n_faces() as u64);
    for &v in mesh.face_indexes() {
        out.extend_from_slice(&(v as i32).to_le_bytes());
    }
    out
}

pub fn decode_mesh(bytes: &[u8]) -> Result<SimplicialMesh> {
    let mut r = BinReader::new(bytes);
    let (dim, n_points) = r.dim_header(BlockKind::Coords)?;
    if n_points > MAX_POINTS as u64 {
        return Err(Error::TooManyPoints { count: n_points });
    }
    let coords = r.f64s(n_points, dim.get())?;
    let faces_at = r.pos as u64;
    let (face_dim, n_faces) = r.dim_header(BlockKind::Faces)?;
    if face_dim != dim {
        return Err(Error::ShapeMismatch(format!(
            "faces block at byte offset {faces_at} is {}D but coords are {}D",
            face_dim.get(),
            dim.get()
        )));
    }
    let k = dim.face_len();
    r.ensure(n_faces, k * 4)?;
    let n_points = n_points as usize;
    let mut faces = Vec::with_capacity(n_faces as usize * k);
    let mut face = vec![0u32; k];
    for f in 0..n_faces as usize {
        let at = Location::Offset(r.pos as u64);
        for slot in face.iter_mut() {
            let v = r.i32()?;
            if v < 0 || v as usize >= n_points {
                return Err(Error::IndexOutOfRange {
                    face: f,
                    index: i64::from(v),
                    n_points,
                    at: Some(at),
                });
            }
            *slot = v as u32;
        }
        check_face(f, &face, n_points, Some(at))?;
        faces.extend_from_slice(&face);
    }
    r.finish()?;
    SimplicialMesh::new(dim, coords, faces)
}

pub fn encode_neighbors(nl: &NeighborList) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + nl.entries().len() * 4);
    put_header(
        &mut out,
        BlockKind::Neighbors,
        nl.dim().get() as u32,
        nl.n_points() as u64,
    );
    for &e in nl.entries() {
        out.extend_from_slice(&e.to_le_bytes());
    }
    out
}

pub fn encode_field(field: &FtleField) -> Vec<u8> {
    let mut out = Vec::new();
    put_f64_block(&mut out, BlockKind::Field, 1, field.values());
    out
}

fn put_header(out: &mut Vec<u8>, kind: BlockKind, dim: u32, count: u64) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(kind as u32).to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
}

fn put_f64_block(out: &mut Vec<u8>, kind: BlockKind, width: usize, values: &[f64]) {
    put_header(out, kind, width as u32, (values.len() / width) as u64);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

struct Header {
    dim: u32,
    count: u64,
}

struct BinReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> BinReader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        BinReader { buf, pos: 0 }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or(Error::Truncated(self.buf.len() as u64))?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice length is N"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn i32(&mut self) -> Result<i32> {
        self.take::<4>().map(i32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.take::<8>().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }

    fn header(&mut self, expected: BlockKind) -> Result<Header> {
        let start = self.pos as u64;
        if self.buf.len() < self.pos + HEADER_LEN {
            // Short input with a wrong prefix is more usefully reported as bad magic.
            if self.buf.len() >= self.pos + 4 && &self.buf[self.pos..self.pos + 4] != MAGIC {
                return Err(Error::BadMagic(Location::Offset(start)));
            }
            return Err(Error::Truncated(self.buf.len() as u64));
        }
        if &self.take::<4>()? != MAGIC {
            return Err(Error::BadMagic(Location::Offset(start)));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion {
                version,
                at: Location::Offset(start + 4),
            });
        }
        let kind = self.u32()?;
        if kind != expected as u32 {
            return Err(Error::UnexpectedKind {
                expected: expected.name(),
                found: kind,
                at: Location::Offset(start + 8),
            });
        }
        let dim = self.u32()?;
        let count = self.u64()?;
        Ok(Header { dim, count })
    }

    fn dim_header(&mut self, expected: BlockKind) -> Result<(Dim, u64)> {
        let start = self.pos as u64;
        let h = self.header(expected)?;
        let dim = Dim::from_usize(h.dim as usize).ok_or(Error::UnsupportedDim {
            dim: u64::from(h.dim),
            at: Some(Location::Offset(start + 12)),
        })?;
        Ok((dim, h.count))
    }

    /// Fails early if `count` records of `record_bytes` cannot fit in the rest of the buffer.
    fn ensure(&self, count: u64, record_bytes: usize) -> Result<()> {
        let remaining = (self.buf.len() - self.pos) as u64;
        match count.checked_mul(record_bytes as u64) {
            Some(need) if need <= remaining => Ok(()),
            _ => Err(Error::Truncated(self.buf.len() as u64)),
        }
    }

    fn f64s(&mut self, count: u64, width: usize) -> Result<Vec<f64>> {
        self.ensure(count, width * 8)?;
        let n = count as usize * width;
        (0..n).map(|_| self.f64()).collect()
    }

    fn i32s(&mut self, count: u64, width: usize) -> Result<Vec<i32>> {
        self.ensure(count, width * 4)?;
        let n = count as usize * width;
        (0..n).map(|_| self.i32()).collect()
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "{} trailing bytes after byte offset {}",
                    self.buf.len() - self.pos,
                    self.pos
                ),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// CSV encoding
// ---------------------------------------------------------------------------

pub fn render_mesh(mesh: &SimplicialMesh) -> String {
    let d = mesh.dim().get();
    let mut out = String::from("# mesh: coords block, then faces block\n");
    put_csv_f64_block(&mut out, BlockKind::Coords, d, mesh.coords());
    let faces: Vec<i32> = mesh.face_indexes().iter().map(|&v| v as i32).collect();
    put_csv_i32_block(&mut out, BlockKind::Faces, d, mesh.dim().face_len(), &faces);
    out
}

pub fn parse_mesh(text: &str) -> Result<SimplicialMesh> {
    let mut r = CsvReader::new(text);
    let (dim, n_points) = r.dim_header(BlockKind::Coords)?;
    if n_points > MAX_POINTS as u64 {
        return Err(Error::TooManyPoints { count: n_points });
    }
    let coords = r.f64_rows(n_points, dim.get())?;
    let (face_dim, n_faces) = r.dim_header(BlockKind::Faces)?;
    if face_dim != dim {
        return Err(Error::ShapeMismatch(format!(
            "faces block at line {} is {}D but coords are {}D",
            r.line,
            face_dim.get(),
            dim.get()
        )));
    }
    let n_points = n_points as usize;
    let k = dim.face_len();
    let mut faces = Vec::with_capacity(n_faces as usize * k);
    let mut face = vec![0u32; k];
    for f in 0..n_faces as usize {
        let (line, fields) = r.record(k)?;
        for (slot, field) in face.iter_mut().zip(fields) {
            let v: i64 = parse_num(field, line)?;
            if v < 0 || v as u64 >= n_points as u64 {
                return Err(Error::IndexOutOfRange {
                    face: f,
                    index: v,
                    n_points,
                    at: Some(Location::Line(line)),
                });
            }
            *slot = v as u32;
        }
        check_face(f, &face, n_points, Some(Location::Line(line)))?;
        faces.extend_from_slice(&face);
    }
    r.finish()?;
    SimplicialMesh::new(dim, coords, faces)
}

pub fn render_field(field: &FtleField) -> String {
    let mut out = String::from("# index,value\n");
    for (i, v) in field.values().iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f64(*v)));
    }
    out
}

pub fn parse_field(text: &str) -> Result<FtleField> {
    let mut r = CsvReader::new(text);
    let mut values = Vec::new();
    while let Some((line, fields)) = r.next_record() {
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected index,value, found {} columns", fields.len()),
            });
        }
        let idx: usize = parse_num(fields[0], line)?;
        if idx != values.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected index {}, found {idx}", values.len()),
            });
        }
        values.push(parse_num(fields[1], line)?);
    }
    Ok(FtleField::new(values))
}

fn put_csv_header(out: &mut String, kind: BlockKind, dim: usize, count: usize) {
    out.push_str(&format!("FTLE,{VERSION},{},{dim},{count}\n", kind as u32));
}

fn put_csv_f64_block(out: &mut String, kind: BlockKind, width: usize, values: &[f64]) {
    put_csv_header(out, kind, width, values.len() / width);
    for row in values.chunks_exact(width) {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
}

fn put_csv_i32_block(out: &mut String, kind: BlockKind, dim: usize, width: usize, values: &[i32]) {
    put_csv_header(out, kind, dim, values.len() / width);
    for row in values.chunks_exact(width) {
        let cells: Vec<String> = row.iter().map(i32::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
}

/// Shortest round-tripping decimal; non-finite values as `nan`, `inf`, `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        v.to_string()
    }
}

fn parse_num<T: std::str::FromStr>(field: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.parse().map_err(|e: T::Err| Error::Parse {
        line,
        message: format!("{field:?}: {e}"),
    })
}

struct CsvReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> CsvReader<'a> {
    fn new(text: &'a str) -> Self {
        CsvReader {
            lines: text.lines().enumerate(),
            line: 0,
        }
    }

    fn next_record(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.lines.by_ref() {
            self.line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            return Some((self.line, content.split(',').map(str::trim).collect()));
        }
        None
    }

    fn record(&mut self, width: usize) -> Result<(usize, Vec<&'a str>)> {
        let (line, fields) = self.next_record().ok_or_else(|| Error::Parse {
            line: self.line + 1,
            message: "unexpected end of file".to_owned(),
        })?;
        if fields.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} columns, found {}", fields.len()),
            });
        }
        Ok((line, fields))
    }

    fn dim_header(&mut self, expected: BlockKind) -> Result<(Dim, u64)> {
        let (line, fields) = self.record(5).map_err(|e| match e {
            Error::Parse { line, .. } => Error::Parse {
                line,
                message: format!("expected header FTLE,{VERSION},{},<dim>,<count>", expected as u32),
            },
            e => e,
        })?;
        if fields[0] != "FTLE" {
            return Err(Error::BadMagic(Location::Line(line)));
        }
        let version: u32 = parse_num(fields[1], line)?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion {
                version,
                at: Location::Line(line),
            });
        }
        let kind: u32 = parse_num(fields[2], line)?;
        if kind != expected as u32 {
            return Err(Error::UnexpectedKind {
                expected: expected.name(),
                found: kind,
                at: Location::Line(line),
            });
        }
        let dim: u64 = parse_num(fields[3], line)?;
        let dim = Dim::from_usize(dim as usize).ok_or(Error::UnsupportedDim {
            dim,
            at: Some(Location::Line(line)),
        })?;
        let count: u64 = parse_num(fields[4], line)?;
        Ok((dim, count))
    }

    fn f64_rows(&mut self, count: u64, width: usize) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for _ in 0..count {
            let (line, fields) = self.record(width)?;
            for f in fields {
                out.push(parse_num(f, line)?);
            }
        }
        Ok(out)
    }

    fn i32_rows(&mut self, count: u64, width: usize) -> Result<Vec<i32>> {
        let mut out = Vec::new();
        for _ in 0..count {
            let (line, fields) = self.record(width)?;
            for f in fields {
                out.push(parse_num(f, line)?);
            }
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<()> {
        match self.next_record() {
            None => Ok(()),
            Some((line, _)) => Err(Error::Parse {
                line,
                message: "unexpected trailing record".to_owned(),
            }),
        }
    }
}

fn utf8(bytes: &[u8]) -> Result<String> {
    String::from_utf8(bytes.to_vec()).map_err(|e| Error::Parse {
        line: 0,
        message: format!("not valid UTF-8: {e}"),
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}
