//! Binary index files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! header   "HDX1" version:u32 n:u64 k:u32 sigma:u32 mode:u8 tau:u32 seed:u64
//!          cluster_cap:u32 (u32::MAX = uncapped) flags:u8 text_crc:u32
//! text     [flags & HAS_TEXT] len:u64 symbols:u32*len
//! tree     count:u32 then nodes in preorder
//!            pivot: 0:u8 base:u32 alts:u8 (offset:u32 symbol:u32)*alts m:u32 k_rem:u8 size:u32 children:u8
//!            leaf:  1:u8 label:u32 size:u32
//! labels   count:u32 then per path label
//!            bits:u64 len:u8 n:u32 sigma:u32 chain_len:u32 clusters:u32 starts:u32 seed:u64
//!            per cluster: seed:u64 count:u32 (end:u32 start:u32)*count
//!            missing: keys:u32 then per key j:u32 count:u32 i:u32*count
//! crc32 of everything above
//! ```
//!
//! Children are listed in slot order, so the bitmap alone fixes the shape.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use mismatch_index::fninv::{Cluster, InversionIndex, InversionParams};
use mismatch_index::text::{pad_text_reserved, Alteration};
use mismatch_index::tree::{CglTree, LeafNode, Node, PathLabel, PivotNode, Slot, NONE};
use mismatch_index::{BuildError, BuildParams, MismatchIndex, Mode, Symbol};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"HDX1";
pub const VERSION: u32 = 1;

const HAS_TEXT: u8 = 1;
const PARANOID: u8 = 2;
const TAG_PIVOT: u8 = 0;
const TAG_LEAF: u8 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes; not an index file")]
    BadMagic,
    #[error("unsupported index format version {0}")]
    UnsupportedVersion(u32),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("index file is truncated or malformed: {0}")]
    Malformed(&'static str),
    #[error("index was saved without its text; supply the text to load it")]
    TextRequired,
    #[error("supplied text does not match the text the index was built on")]
    TextMismatch,
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn text_crc(raw: &[Symbol]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    for &s in raw {
        h.update(&s.to_le_bytes());
    }
    h.finalize()
}

/// Serializes `index`. With `include_text` false the file must be loaded
/// together with the original text.
pub fn to_bytes(index: &MismatchIndex, include_text: bool) -> Vec<u8> {
    let p = index.params();
    let raw = index.text().raw();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    // Writes into a Vec cannot fail.
    let w = &mut out;
    w.write_u32::<LE>(VERSION).unwrap();
    w.write_u64::<LE>(raw.len() as u64).unwrap();
    w.write_u32::<LE>(p.k as u32).unwrap();
    w.write_u32::<LE>(p.sigma as u32).unwrap();
    match p.mode {
        Mode::Linear => {
            w.write_u8(0).unwrap();
            w.write_u32::<LE>(1).unwrap();
        }
        Mode::Succinct { tau } => {
            w.write_u8(1).unwrap();
            w.write_u32::<LE>(tau as u32).unwrap();
        }
    }
    w.write_u64::<LE>(p.seed).unwrap();
    w.write_u32::<LE>(p.cluster_cap.unwrap_or(u32::MAX)).unwrap();
    let mut flags = 0;
    if include_text {
        flags |= HAS_TEXT;
    }
    if p.paranoid {
        flags |= PARANOID;
    }
    w.write_u8(flags).unwrap();
    w.write_u32::<LE>(text_crc(raw)).unwrap();
    if include_text {
        w.write_u64::<LE>(raw.len() as u64).unwrap();
        for &s in raw {
            w.write_u32::<LE>(s).unwrap();
        }
    }
    write_tree(w, index.tree());
    w.write_u32::<LE>(index.inversions().len() as u32).unwrap();
    for (lambda, inv) in index.inversions() {
        write_inversion(w, *lambda, inv);
    }
    let crc = crc32fast::hash(&out);
    out.write_u32::<LE>(crc).unwrap();
    out
}

fn write_tree(w: &mut Vec<u8>, tree: &CglTree) {
    w.write_u32::<LE>(tree.len() as u32).unwrap();
    for node in tree.nodes() {
        match node {
            Node::Pivot(p) => {
                w.write_u8(TAG_PIVOT).unwrap();
                w.write_u32::<LE>(p.base).unwrap();
                let alts = tree.pivot(p).alts;
                w.write_u8(alts.len() as u8).unwrap();
                for a in alts {
                    w.write_u32::<LE>(a.offset).unwrap();
                    w.write_u32::<LE>(a.symbol).unwrap();
                }
                w.write_u32::<LE>(p.m).unwrap();
                w.write_u8(p.k_rem).unwrap();
                w.write_u32::<LE>(p.size).unwrap();
                let bitmap = Slot::ALL
                    .iter()
                    .filter(|&&s| p.children[s as usize] != NONE)
                    .fold(0u8, |acc, &s| acc | 1 << s as u8);
                w.write_u8(bitmap).unwrap();
            }
            Node::Leaf(l) => {
                w.write_u8(TAG_LEAF).unwrap();
                w.write_u32::<LE>(l.label).unwrap();
                w.write_u32::<LE>(l.size).unwrap();
            }
        }
    }
}

fn write_inversion(w: &mut Vec<u8>, lambda: PathLabel, inv: &InversionIndex) {
    w.write_u64::<LE>(lambda.bits).unwrap();
    w.write_u8(lambda.len).unwrap();
    let p = &inv.params;
    for v in [p.n, p.sigma, p.chain_len, p.clusters, p.starts] {
        w.write_u32::<LE>(v).unwrap();
    }
    w.write_u64::<LE>(p.seed).unwrap();
    for c in &inv.clusters {
        w.write_u64::<LE>(c.seed).unwrap();
        w.write_u32::<LE>(c.ends.len() as u32).unwrap();
        for &(e, s) in &c.ends {
            w.write_u32::<LE>(e).unwrap();
            w.write_u32::<LE>(s).unwrap();
        }
    }
    w.write_u32::<LE>(inv.missing.len() as u32).unwrap();
    for (j, is) in &inv.missing {
        w.write_u32::<LE>(*j).unwrap();
        w.write_u32::<LE>(is.len() as u32).unwrap();
        for &i in is {
            w.write_u32::<LE>(i).unwrap();
        }
    }
}

/// Encoded size of the tree section (pivots, child bitmaps, leaf labels).
pub fn tree_bytes(tree: &CglTree) -> usize {
    let mut v = Vec::new();
    write_tree(&mut v, tree);
    v.len()
}

/// Encoded size of the inversion sections.
pub fn inversion_bytes(index: &MismatchIndex) -> usize {
    let mut v = Vec::new();
    for (lambda, inv) in index.inversions() {
        write_inversion(&mut v, *lambda, inv);
    }
    v.len()
}

struct Reader<'a> {
    cur: Cursor<&'a [u8]>,
}

fn eof(_: io::Error) -> FormatError {
    FormatError::Malformed("unexpected end of data")
}

impl Reader<'_> {
    fn u8(&mut self) -> Result<u8, FormatError> {
        self.cur.read_u8().map_err(eof)
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        self.cur.read_u32::<LE>().map_err(eof)
    }
    fn u64(&mut self) -> Result<u64, FormatError> {
        self.cur.read_u64::<LE>().map_err(eof)
    }
    /// A length field, refused when it claims more elements of `elem` bytes
    /// than remain.
    fn len(&mut self, elem: usize) -> Result<usize, FormatError> {
        let n = self.u32()? as usize;
        self.check_room(n, elem)?;
        Ok(n)
    }
    fn check_room(&self, n: usize, elem: usize) -> Result<(), FormatError> {
        let left = self.cur.get_ref().len() - self.cur.position() as usize;
        if n.saturating_mul(elem) > left {
            return Err(FormatError::Malformed("length field exceeds file size"));
        }
        Ok(())
    }
}

/// Parses and validates an index file. `text` is required when the file was
/// saved without one and must match the stored checksum either way.
pub fn from_bytes(bytes: &[u8], text: Option<&[Symbol]>) -> Result<MismatchIndex, FormatError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(FormatError::Malformed("header cut short"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    if bytes.len() < 12 {
        return Err(FormatError::Malformed("missing checksum"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed });
    }
    let mut r = Reader { cur: Cursor::new(body) };
    r.cur.set_position(8);

    let n = r.u64()? as usize;
    let k = r.u32()? as usize;
    let sigma = r.u32()? as usize;
    let mode = match (r.u8()?, r.u32()? as usize) {
        (0, _) => Mode::Linear,
        (1, tau) => Mode::Succinct { tau },
        _ => return Err(FormatError::Malformed("unknown mode")),
    };
    let seed = r.u64()?;
    let cluster_cap = match r.u32()? {
        u32::MAX => None,
        c => Some(c),
    };
    let flags = r.u8()?;
    let crc = r.u32()?;
    let params = BuildParams::new(k, sigma)
        .mode(mode)
        .seed(seed)
        .cluster_cap(cluster_cap)
        .paranoid(flags & PARANOID != 0);

    let stored_text = if flags & HAS_TEXT != 0 {
        let len = r.u64()? as usize;
        r.check_room(len, 4)?;
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push(r.u32()?);
        }
        Some(v)
    } else {
        None
    };
    let raw = match (stored_text, text) {
        (Some(v), Some(t)) if v.as_slice() != t => return Err(FormatError::TextMismatch),
        (Some(v), _) => v,
        (None, Some(t)) => t.to_vec(),
        (None, None) => return Err(FormatError::TextRequired),
    };
    if raw.len() != n || text_crc(&raw) != crc {
        return Err(FormatError::TextMismatch);
    }
    let padded = pad_text_reserved(&raw, k).map_err(BuildError::from)?;

    let tree = read_tree(&mut r, n, k, sigma)?;
    let count = r.len(13)?;
    let mut inversions = BTreeMap::new();
    for _ in 0..count {
        let (lambda, inv) = read_inversion(&mut r)?;
        if inversions.insert(lambda, inv).is_some() {
            return Err(FormatError::Malformed("duplicate path label"));
        }
    }
    if r.cur.position() as usize != body.len() {
        return Err(FormatError::Malformed("trailing bytes"));
    }
    Ok(MismatchIndex::from_parts(padded, params, tree, inversions)?)
}

fn read_tree(r: &mut Reader<'_>, n: usize, k: usize, sigma: usize) -> Result<CglTree, FormatError> {
    let count = r.len(9)?;
    let mut nodes = Vec::with_capacity(count);
    let mut alts = Vec::new();
    let mut bitmaps = Vec::with_capacity(count);
    for _ in 0..count {
        match r.u8()? {
            TAG_PIVOT => {
                let base = r.u32()?;
                if base as usize >= n {
                    return Err(FormatError::Malformed("pivot position out of range"));
                }
                let alt_len = r.u8()?;
                if alt_len as usize > k {
                    return Err(FormatError::Malformed("pivot carries more than k alterations"));
                }
                let alt_start = alts.len() as u32;
                for _ in 0..alt_len {
                    let offset = r.u32()? as usize;
                    let symbol = r.u32()?;
                    alts.push(Alteration::new(offset, symbol));
                }
                let m = r.u32()?;
                let k_rem = r.u8()?;
                let size = r.u32()?;
                let bitmap = r.u8()?;
                if bitmap >> Slot::ALL.len() != 0 {
                    return Err(FormatError::Malformed("bad child bitmap"));
                }
                bitmaps.push(bitmap);
                nodes.push(Node::Pivot(PivotNode {
                    base,
                    alt_start,
                    alt_len,
                    m,
                    k_rem,
                    size,
                    children: [NONE; 7],
                }));
            }
            TAG_LEAF => {
                let label = r.u32()?;
                let size = r.u32()?;
                bitmaps.push(0);
                nodes.push(Node::Leaf(LeafNode { label, size, path: PathLabel::EMPTY }));
            }
            _ => return Err(FormatError::Malformed("unknown node tag")),
        }
    }
    // Rebuild child links from preorder: each present slot takes the next
    // unclaimed subtree.
    let mut next = 1usize;
    link(&mut nodes, &bitmaps, 0, &mut next)?;
    if count > 0 && next != count {
        return Err(FormatError::Malformed("tree shape does not cover every node"));
    }
    let tree = CglTree::from_parts(nodes, alts, n, k, Some(sigma));
    let labels = tree.path_labels();
    let (mut nodes, alts) = (tree.nodes().to_vec(), tree.alterations().to_vec());
    for (node, label) in nodes.iter_mut().zip(labels) {
        if let Node::Leaf(l) = node {
            l.path = label;
        }
    }
    Ok(CglTree::from_parts(nodes, alts, n, k, Some(sigma)))
}

fn link(nodes: &mut [Node], bitmaps: &[u8], id: usize, next: &mut usize) -> Result<(), FormatError> {
    if id >= nodes.len() {
        return Ok(());
    }
    for slot in Slot::ALL {
        if bitmaps[id] & (1 << slot as u8) == 0 {
            continue;
        }
        let child = *next;
        if child >= nodes.len() {
            return Err(FormatError::Malformed("child bitmap points past the last node"));
        }
        *next += 1;
        if let Node::Pivot(p) = &mut nodes[id] {
            p.children[slot as usize] = child as u32;
        }
        link(nodes, bitmaps, child, next)?;
    }
    Ok(())
}

fn read_inversion(r: &mut Reader<'_>) -> Result<(PathLabel, InversionIndex), FormatError> {
    let bits = r.u64()?;
    let len = r.u8()?;
    if len > 64 {
        return Err(FormatError::Malformed("path label too long"));
    }
    let lambda = PathLabel { bits, len };
    let n = r.u32()?;
    let sigma = r.u32()?;
    let chain_len = r.u32()?;
    let clusters = r.u32()?;
    let starts = r.u32()?;
    let seed = r.u64()?;
    let params = InversionParams { n, sigma, chain_len, clusters, starts, seed };
    r.check_room(clusters as usize, 12)?;
    let mut cs = Vec::with_capacity(clusters as usize);
    for _ in 0..clusters {
        let seed = r.u64()?;
        let m = r.len(8)?;
        let mut ends = Vec::with_capacity(m);
        for _ in 0..m {
            ends.push((r.u32()?, r.u32()?));
        }
        if ends.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(FormatError::Malformed("cluster entries not sorted"));
        }
        cs.push(Cluster { seed, ends });
    }
    let keys = r.len(8)?;
    let mut missing = BTreeMap::new();
    for _ in 0..keys {
        let j = r.u32()?;
        let m = r.len(4)?;
        let mut is = Vec::with_capacity(m);
        for _ in 0..m {
            is.push(r.u32()?);
        }
        missing.insert(j, is);
    }
    Ok((lambda, InversionIndex { params, clusters: cs, missing }))
}

pub fn save(index: &MismatchIndex, path: &Path, include_text: bool) -> Result<(), FormatError> {
    fs::write(path, to_bytes(index, include_text))?;
    Ok(())
}

pub fn load(path: &Path, text: Option<&[Symbol]>) -> Result<MismatchIndex, FormatError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    from_bytes(&bytes, text)
}
