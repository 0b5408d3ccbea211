use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffinePyramid, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshElement {
    #[serde(flatten)]
    pub pyramid: AffinePyramid<f64>,
    /// Global indices of the vertices in reference order: base corners
    /// `(0,0,0), (1,0,0), (1,1,0), (0,1,0)`, then the apex.
    pub global_vertex_ids: [usize; 5],
}

/// A face or edge with its sorted vertex set and the elements sharing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshEntity {
    pub vertices: Vec<usize>,
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PyramidMesh {
    pub n: usize,
    pub vertices: Vec<Vec3<f64>>,
    pub elements: Vec<MeshElement>,
    pub faces: Vec<MeshEntity>,
    pub edges: Vec<MeshEntity>,
    pub h: f64,
    pub rho_max: f64,
}

/// Local vertex positions of the faces and edges of a pyramid.
const FACES: [&[usize]; 5] = [&[0, 1, 4], &[1, 2, 4], &[2, 3, 4], &[3, 0, 4], &[0, 1, 2, 3]];
const EDGES: [[usize; 2]; 8] = [[0, 1], [1, 2], [2, 3], [3, 0], [0, 4], [1, 4], [2, 4], [3, 4]];

fn entities(elements: &[MeshElement], local: &[&[usize]]) -> Vec<MeshEntity> {
    let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (e, el) in elements.iter().enumerate() {
        for l in local {
            let mut vs: Vec<usize> = l.iter().map(|&i| el.global_vertex_ids[i]).collect();
            vs.sort_unstable();
            map.entry(vs).or_default().push(e);
        }
    }
    map.into_iter().map(|(vertices, elements)| MeshEntity { vertices, elements }).collect()
}

/// Unit cube split into `n^3` subcubes, each into six pyramids over its
/// faces with apex at the subcube centre.
pub fn build_cube_mesh(n: usize) -> Result<PyramidMesh> {
    if n == 0 {
        return Err(Error::Config("the mesh needs at least one subdivision".into()));
    }
    let m = n + 1;
    let grid = |i: usize, j: usize, l: usize| i + m * (j + m * l);
    let mut vertices: Vec<Vec3<f64>> = Vec::with_capacity(m * m * m + n * n * n);
    for l in 0..m {
        for j in 0..m {
            for i in 0..m {
                vertices.push([i as f64 / n as f64, j as f64 / n as f64, l as f64 / n as f64]);
            }
        }
    }
    let mut elements = Vec::with_capacity(6 * n * n * n);
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                let centre = vertices.len();
                vertices.push([(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64, (l as f64 + 0.5) / n as f64]);
                for axis in 0..3 {
                    for side in 0..2 {
                        // corners of the face in cyclic order
                        let corner = |a: usize, b: usize| {
                            let mut c = [i, j, l];
                            c[axis] += side;
                            c[(axis + 1) % 3] += a;
                            c[(axis + 2) % 3] += b;
                            grid(c[0], c[1], c[2])
                        };
                        let mut ring = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
                        // lowest index first, then orient towards the apex
                        let start = (0..4).min_by_key(|&t| ring[t]).expect("four corners");
                        ring.rotate_left(start);
                        let el = element(&vertices, ring, centre).or_else(|_| {
                            ring[1..].reverse();
                            element(&vertices, ring, centre)
                        })?;
                        elements.push(el);
                    }
                }
            }
        }
    }
    let faces = entities(&elements, &FACES);
    let edge_refs: Vec<&[usize]> = EDGES.iter().map(|e| e.as_slice()).collect();
    let edges = entities(&elements, &edge_refs);
    let mut h = 0.0f64;
    let mut rho_max = 0.0f64;
    for el in &elements {
        let sp = el.pyramid.shape_params()?;
        h = h.max(sp.h);
        rho_max = rho_max.max(sp.rho);
    }
    let mesh = PyramidMesh { n, vertices, elements, faces, edges, h, rho_max };
    mesh.check_conformity()?;
    Ok(mesh)
}

fn element(vertices: &[Vec3<f64>], ring: [usize; 4], apex: usize) -> Result<MeshElement> {
    let p = |i: usize| vertices[i];
    let d = |a: usize, b: usize| -> Vec3<f64> { std::array::from_fn(|t| p(b)[t] - p(a)[t]) };
    let pyramid = AffinePyramid::new(p(ring[0]), d(ring[0], ring[1]), d(ring[0], ring[3]), p(apex))?;
    Ok(MeshElement { pyramid, global_vertex_ids: [ring[0], ring[1], ring[2], ring[3], apex] })
}

impl PyramidMesh {
    pub fn volume(&self) -> f64 {
        self.elements.iter().map(|e| e.pyramid.volume()).sum()
    }

    /// Every face is shared by at most two elements, and the element
    /// vertices agree with the stored coordinates.
    pub fn check_conformity(&self) -> Result<()> {
        for f in &self.faces {
            if f.elements.len() > 2 {
                return Err(Error::NonconformingMesh(format!("face {:?} has {} elements", f.vertices, f.elements.len())));
            }
        }
        for (e, el) in self.elements.iter().enumerate() {
            for (x, &id) in el.pyramid.vertices().iter().zip(&el.global_vertex_ids) {
                let y = self.vertices[id];
                if (0..3).any(|t| (x[t] - y[t]).abs() > 1e-12) {
                    return Err(Error::NonconformingMesh(format!("element {e} does not match vertex {id}")));
                }
            }
        }
        Ok(())
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = &MeshEntity> {
        self.faces.iter().filter(|f| f.elements.len() == 1)
    }

    /// `{vertices: [[x,y,z]...], elements: [{v0,e1,e2,apex,global_vertex_ids}...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "vertices": self.vertices, "elements": self.elements })
    }
}
