use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use serde::Serialize;

use super::descriptor::hash_bins;
use super::{extract_feature_points, point_descriptors, DescriptorMode, DocId, LlahParams};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::imaging::GrayImage;

pub const STORE_MAGIC: &[u8; 4] = b"LLAH";
pub const STORE_VERSION: u16 = 1;

/// One posting in the hash table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HashEntry {
    pub hash: u32,
    pub doc_id: DocId,
    pub point_id: u32,
    pub bins: Vec<u8>,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct DocEntries {
    points: Vec<Point>,
    entries: Vec<HashEntry>,
}

/// Mutable index under construction. Single writer; call
/// [`StoreBuilder::finish`] to obtain the immutable, queryable store.
#[derive(Clone, Debug, PartialEq)]
pub struct StoreBuilder {
    params: LlahParams,
    docs: BTreeMap<DocId, DocEntries>,
}

impl StoreBuilder {
    pub fn new(params: LlahParams) -> Result<Self> {
        params.validate()?;
        Ok(StoreBuilder {
            params,
            docs: BTreeMap::new(),
        })
    }

    pub fn params(&self) -> &LlahParams {
        &self.params
    }

    /// Index a rendered page. Returns the number of descriptors stored,
    /// `feature_points * C(n, m)`; each is posted under all `m` cyclic
    /// orderings. Re-indexing a `doc_id` replaces its previous entries.
    pub fn index_page(&mut self, page: &GrayImage, doc_id: DocId) -> Result<usize> {
        let points = extract_feature_points(page, &self.params)?;
        self.index_points(points, doc_id)
    }

    /// Index an explicit feature-point set.
    pub fn index_points(&mut self, points: Vec<Point>, doc_id: DocId) -> Result<usize> {
        let doc = build_doc(points, &self.params)?;
        Ok(self.insert_prepared(doc_id, PreparedDoc(doc)))
    }

    /// Insert a document prepared by [`StoreBuilder::prepare_page`], so that
    /// feature extraction can run on several threads.
    pub fn insert_prepared(&mut self, doc_id: DocId, prepared: PreparedDoc) -> usize {
        let mut doc = prepared.0;
        doc.entries.iter_mut().for_each(|e| e.doc_id = doc_id);
        let count = doc.points.len() * self.params.subsets();
        self.docs.insert(doc_id, doc);
        count
    }

    /// Thread-safe half of [`StoreBuilder::index_page`].
    pub fn prepare_page(page: &GrayImage, params: &LlahParams) -> Result<PreparedDoc> {
        let points = extract_feature_points(page, params)?;
        build_doc(points, params).map(PreparedDoc)
    }

    pub fn finish(self) -> LlahStore {
        let mut entries: Vec<HashEntry> = Vec::new();
        let mut docs = BTreeMap::new();
        for (id, d) in self.docs {
            entries.extend(d.entries);
            docs.insert(id, d.points);
        }
        entries.sort_unstable();
        LlahStore::from_parts(self.params, docs, entries)
    }
}

/// Feature points and postings of one page, ready for insertion.
#[derive(Clone, Debug)]
pub struct PreparedDoc(DocEntries);

impl PreparedDoc {
    pub fn feature_points(&self) -> &[Point] {
        &self.0.points
    }
}

fn build_doc(points: Vec<Point>, params: &LlahParams) -> Result<DocEntries> {
    if points.len() < params.n + 1 {
        return Err(Error::InsufficientPoints {
            needed: params.n + 1,
            found: points.len(),
        });
    }
    let mut entries = Vec::with_capacity(points.len() * params.subsets() * params.m);
    for i in 0..points.len() {
        for d in point_descriptors(i, &points, params, DescriptorMode::Index)? {
            entries.push(HashEntry {
                hash: hash_bins(&d.bins.0, params.k_base, params.hash_size),
                doc_id: 0,
                point_id: i as u32,
                bins: d.bins.0,
            });
        }
    }
    Ok(DocEntries { points, entries })
}

/// Size and bucket statistics of a store.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StoreStats {
    pub documents: usize,
    pub feature_points: usize,
    /// `feature_points * C(n, m)`.
    pub descriptors: usize,
    /// Stored postings: every descriptor under each of its `m` orderings.
    pub postings: usize,
    pub occupied_buckets: usize,
    pub load_factor: f64,
    pub mean_bucket_len: f64,
    pub max_bucket_len: usize,
}

/// Immutable hash index. Postings are sorted by hash so that a bucket is a
/// contiguous range; safe to share between threads.
#[derive(Clone, Debug, PartialEq)]
pub struct LlahStore {
    params: LlahParams,
    docs: BTreeMap<DocId, Vec<Point>>,
    hashes: Vec<u32>,
    doc_ids: Vec<DocId>,
    point_ids: Vec<u32>,
    bins: Vec<u8>,
}

impl LlahStore {
    fn from_parts(
        params: LlahParams,
        docs: BTreeMap<DocId, Vec<Point>>,
        entries: Vec<HashEntry>,
    ) -> Self {
        let dims = params.dims();
        let mut store = LlahStore {
            params,
            docs,
            hashes: Vec::with_capacity(entries.len()),
            doc_ids: Vec::with_capacity(entries.len()),
            point_ids: Vec::with_capacity(entries.len()),
            bins: Vec::with_capacity(entries.len() * dims),
        };
        for e in entries {
            store.hashes.push(e.hash);
            store.doc_ids.push(e.doc_id);
            store.point_ids.push(e.point_id);
            store.bins.extend_from_slice(&e.bins);
        }
        store
    }

    pub fn params(&self) -> &LlahParams {
        &self.params
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = DocId> + '_ {
        self.docs.keys().copied()
    }

    pub fn doc_points(&self, doc: DocId) -> Option<&[Point]> {
        self.docs.get(&doc).map(Vec::as_slice)
    }

    pub fn postings(&self) -> usize {
        self.hashes.len()
    }

    fn bucket(&self, hash: u32) -> Range<usize> {
        let lo = self.hashes.partition_point(|&h| h < hash);
        let hi = lo + self.hashes[lo..].partition_point(|&h| h == hash);
        lo..hi
    }

    /// Postings whose full descriptor equals `bins` (not merely its hash).
    pub fn lookup<'a>(&'a self, bins: &'a [u8]) -> impl Iterator<Item = (DocId, u32)> + 'a {
        let dims = self.params.dims();
        let hash = hash_bins(bins, self.params.k_base, self.params.hash_size);
        self.bucket(hash)
            .filter(move |&i| &self.bins[i * dims..(i + 1) * dims] == bins)
            .map(move |i| (self.doc_ids[i], self.point_ids[i]))
    }

    pub fn entry(&self, i: usize) -> HashEntry {
        let dims = self.params.dims();
        HashEntry {
            hash: self.hashes[i],
            doc_id: self.doc_ids[i],
            point_id: self.point_ids[i],
            bins: self.bins[i * dims..(i + 1) * dims].to_vec(),
        }
    }

    pub fn stats(&self) -> StoreStats {
        let mut occupied = 0usize;
        let mut max_len = 0usize;
        let mut i = 0;
        while i < self.hashes.len() {
            let h = self.hashes[i];
            let start = i;
            while i < self.hashes.len() && self.hashes[i] == h {
                i += 1;
            }
            occupied += 1;
            max_len = max_len.max(i - start);
        }
        let feature_points: usize = self.docs.values().map(Vec::len).sum();
        StoreStats {
            documents: self.docs.len(),
            feature_points,
            descriptors: feature_points * self.params.subsets(),
            postings: self.hashes.len(),
            occupied_buckets: occupied,
            load_factor: self.hashes.len() as f64 / self.params.hash_size as f64,
            mean_bucket_len: if occupied == 0 {
                0.0
            } else {
                self.hashes.len() as f64 / occupied as f64
            },
            max_bucket_len: max_len,
        }
    }

    /// Little-endian binary serialization:
    ///
    /// ```text
    /// "LLAH" version:u16
    /// params: n m q_levels hash_size k_base min_votes min_blob_pixels (u32)
    ///         feature_sigma:f64  edge_count:u32  edges:f64*
    /// docs:   count:u32 { doc_id:u32 point_count:u32 { x:f64 y:f64 }* }*
    /// blocks: count:u32 { hash:u32 entry_count:u32 { doc_id:u32 point_id:u32 bins:u8*C(m,4) }* }*
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.params;
        let mut out = Vec::with_capacity(64 + self.hashes.len() * (8 + p.dims()));
        out.extend_from_slice(STORE_MAGIC);
        out.extend_from_slice(&STORE_VERSION.to_le_bytes());
        for v in [
            p.n as u32,
            p.m as u32,
            p.q_levels,
            p.hash_size,
            p.k_base,
            p.min_votes,
            p.min_blob_pixels,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&p.feature_sigma.to_le_bytes());
        out.extend_from_slice(&(p.bin_edges.len() as u32).to_le_bytes());
        for e in &p.bin_edges {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out.extend_from_slice(&(self.docs.len() as u32).to_le_bytes());
        for (id, pts) in &self.docs {
            out.extend_from_slice(&id.to_le_bytes());
            out.extend_from_slice(&(pts.len() as u32).to_le_bytes());
            for q in pts {
                out.extend_from_slice(&q.x.to_le_bytes());
                out.extend_from_slice(&q.y.to_le_bytes());
            }
        }
        let dims = p.dims();
        let mut blocks: Vec<Range<usize>> = Vec::new();
        let mut i = 0;
        while i < self.hashes.len() {
            let r = self.bucket(self.hashes[i]);
            i = r.end;
            blocks.push(r);
        }
        out.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
        for r in blocks {
            out.extend_from_slice(&self.hashes[r.start].to_le_bytes());
            out.extend_from_slice(&(r.len() as u32).to_le_bytes());
            for k in r {
                out.extend_from_slice(&self.doc_ids[k].to_le_bytes());
                out.extend_from_slice(&self.point_ids[k].to_le_bytes());
                out.extend_from_slice(&self.bins[k * dims..(k + 1) * dims]);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != STORE_MAGIC {
            return Err(Error::StoreFormat("bad magic".into()));
        }
        let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
        if version != STORE_VERSION {
            return Err(Error::StoreFormat(format!("unsupported version {version}")));
        }
        let n = r.u32()? as usize;
        let m = r.u32()? as usize;
        let q_levels = r.u32()?;
        let hash_size = r.u32()?;
        let k_base = r.u32()?;
        let min_votes = r.u32()?;
        let min_blob_pixels = r.u32()?;
        let feature_sigma = r.f64()?;
        let edge_count = r.u32()? as usize;
        let bin_edges = (0..edge_count).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let params = LlahParams {
            n,
            m,
            q_levels,
            bin_edges,
            hash_size,
            k_base,
            min_votes,
            feature_sigma,
            min_blob_pixels,
        };
        params
            .validate()
            .map_err(|e| Error::StoreFormat(format!("invalid parameter block: {e}")))?;

        let mut docs = BTreeMap::new();
        for _ in 0..r.u32()? {
            let id = r.u32()?;
            let count = r.u32()? as usize;
            let pts = (0..count)
                .map(|_| Ok(Point::new(r.f64()?, r.f64()?)))
                .collect::<Result<Vec<_>>>()?;
            docs.insert(id, pts);
        }

        let dims = params.dims();
        let mut store = LlahStore::from_parts(params, docs, Vec::new());
        let mut last: Option<u32> = None;
        for _ in 0..r.u32()? {
            let hash = r.u32()?;
            if last.is_some_and(|l| l >= hash) {
                return Err(Error::StoreFormat("blocks are not sorted by hash".into()));
            }
            last = Some(hash);
            for _ in 0..r.u32()? {
                let doc = r.u32()?;
                let point = r.u32()?;
                let valid = store.docs.get(&doc).is_some_and(|p| (point as usize) < p.len());
                if !valid {
                    return Err(Error::StoreFormat(format!(
                        "entry references unknown point {doc}/{point}"
                    )));
                }
                store.hashes.push(hash);
                store.doc_ids.push(doc);
                store.point_ids.push(point);
                store.bins.extend_from_slice(r.take(dims)?);
            }
        }
        if r.pos != bytes.len() {
            return Err(Error::StoreFormat("trailing bytes".into()));
        }
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let write = || -> Result<()> {
            let mut f = BufWriter::new(fs::File::create(path)?);
            f.write_all(&self.to_bytes())?;
            f.flush()?;
            Ok(())
        };
        write().map_err(|e| e.at(path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        fs::read(path)
            .map_err(Error::from)
            .and_then(|b| LlahStore::from_bytes(&b))
            .map_err(|e| e.at(path))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::StoreFormat("unexpected end of file".into()))?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
