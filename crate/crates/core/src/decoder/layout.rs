use crate::error::{Error, Result};
use crate::graph::{validate_graph, AugmentedGraph};

/// Flat edge indexing of a validated graph.
///
/// Bundle-level edges are numbered test-major (test `t` owns
/// `t*d_cz..(t+1)*d_cz`), item-level edges likewise with stride `d_c`.
/// `bundle_edges` / `item_edges` give each variable's edge ids with strides
/// `d_vz` / `d_vx`.
#[derive(Debug, Clone)]
pub struct DecoderGraph {
    pub q: usize,
    pub n: usize,
    pub n_h: usize,
    pub m_z: usize,
    pub m_x: usize,
    pub d_c: usize,
    pub d_cz: usize,
    pub d_vx: usize,
    pub d_vz: usize,
    pub(crate) z_edge_bundle: Vec<u32>,
    pub(crate) bundle_edges: Vec<u32>,
    pub(crate) x_edge_item: Vec<u32>,
    pub(crate) item_edges: Vec<u32>,
    pub(crate) bundle_items: Vec<u32>,
}

impl DecoderGraph {
    pub fn new(graph: &AugmentedGraph) -> Result<Self> {
        let report = validate_graph(graph);
        if !report.is_empty() {
            return Err(Error::Malformed(format!("invalid graph: {report}")));
        }
        let p = graph.params;
        if p.q > u16::MAX as usize {
            return Err(Error::InvalidParam(format!("q = {} too large", p.q)));
        }

        let z_edge_bundle: Vec<u32> = graph.cn_z.iter().flatten().map(|&b| b as u32).collect();
        let bundle_edges = invert(&z_edge_bundle, p.n_h, p.d_vz);
        let x_edge_item: Vec<u32> = graph.cn_x.iter().flatten().map(|&i| i as u32).collect();
        let item_edges = invert(&x_edge_item, p.n, p.d_vx);
        let bundle_items: Vec<u32> = graph
            .bundle_members()
            .into_iter()
            .flatten()
            .map(|i| i as u32)
            .collect();

        Ok(Self {
            q: p.q,
            n: p.n,
            n_h: p.n_h,
            m_z: p.m_z,
            m_x: p.m_x,
            d_c: p.d_c,
            d_cz: p.d_cz,
            d_vx: p.d_vx,
            d_vz: p.d_vz,
            z_edge_bundle,
            bundle_edges,
            x_edge_item,
            item_edges,
            bundle_items,
        })
    }

    pub fn z_edges(&self) -> usize {
        self.z_edge_bundle.len()
    }

    pub fn x_edges(&self) -> usize {
        self.x_edge_item.len()
    }

    /// Bundle at the far end of bundle-level edge `e`.
    pub fn z_edge_bundle(&self, e: usize) -> usize {
        self.z_edge_bundle[e] as usize
    }

    /// Item at the far end of item-level edge `e`.
    pub fn x_edge_item(&self, e: usize) -> usize {
        self.x_edge_item[e] as usize
    }

    pub fn bundle_items(&self, b: usize) -> &[u32] {
        &self.bundle_items[b * self.q..(b + 1) * self.q]
    }

    pub fn bundle_edges(&self, b: usize) -> &[u32] {
        &self.bundle_edges[b * self.d_vz..(b + 1) * self.d_vz]
    }

    pub fn item_edges(&self, i: usize) -> &[u32] {
        &self.item_edges[i * self.d_vx..(i + 1) * self.d_vx]
    }
}

/// Groups edge ids by endpoint; every endpoint has exactly `degree` edges.
fn invert(endpoint_of: &[u32], nodes: usize, degree: usize) -> Vec<u32> {
    let mut fill = vec![0usize; nodes];
    let mut out = vec![0u32; nodes * degree];
    for (e, &v) in endpoint_of.iter().enumerate() {
        let v = v as usize;
        out[v * degree + fill[v]] = e as u32;
        fill[v] += 1;
    }
    out
}
