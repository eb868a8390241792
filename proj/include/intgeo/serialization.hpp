#pragma once
// JSON encoding of the library's value types: alternating forms, subspaces,
// matrices/rotations (row-major), and polytope construction data.  Encoding
// uses insertion-ordered JSON so that a document produced from the same
// inputs is byte-stable across runs.

#include <json.hpp>

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intgeo/forms.hpp"
#include "intgeo/grassmann.hpp"
#include "intgeo/polytope.hpp"

namespace intgeo {

using ordered_json = nlohmann::ordered_json;

// --- dense vectors and matrices -------------------------------------------

inline ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const ordered_json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector_from_json: expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

// Row-major flattening; shape travels alongside the data.
inline ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

inline Eigen::MatrixXd matrix_from_json(const ordered_json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw std::invalid_argument("matrix_from_json: array size does not match the declared shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r * cols + c)].get<double>();
  return m;
}

// --- alternating forms ------------------------------------------------------
// {dim, degree, coeffs: [[[i, j, ...], value], ...]} listing nonzero terms
// with strictly increasing index tuples.

inline ordered_json form_to_json(const AlternatingForm& f) {
  ordered_json coeffs = ordered_json::array();
  for (int r = 0; r < f.terms(); ++r) {
    double v = f.raw(r);
    if (v == 0.0) continue;
    ordered_json idx = ordered_json::array();
    unsigned mask = f.mask_of(r);
    for (int i = 0; i < f.dim(); ++i)
      if (mask & (1u << i)) idx.push_back(i);
    coeffs.push_back(ordered_json::array({idx, v}));
  }
  return ordered_json{{"dim", f.dim()}, {"degree", f.degree()}, {"coeffs", std::move(coeffs)}};
}

inline AlternatingForm form_from_json(const ordered_json& j) {
  AlternatingForm f(j.at("dim").get<int>(), j.at("degree").get<int>());
  for (const auto& term : j.at("coeffs")) {
    std::vector<int> idx = term.at(0).get<std::vector<int>>();
    f.add_term(std::span<const int>(idx), term.at(1).get<double>());
  }
  return f;
}

// --- subspaces ---------------------------------------------------------------
// {n, k, frame: row-major n*k array}.

inline ordered_json subspace_to_json(const Subspace& w) {
  return ordered_json{{"n", w.n()}, {"k", w.k()}, {"frame", matrix_to_json(w.frame())}};
}

inline Subspace subspace_from_json(const ordered_json& j) {
  int n = j.at("n").get<int>();
  int k = j.at("k").get<int>();
  return Subspace(matrix_from_json(j.at("frame"), n, k));
}

// --- polytopes ---------------------------------------------------------------
// {family, ...construction parameters...}.  Axes and vertices are listed as
// vectors so configs and reports stay readable.

inline ordered_json polytope_to_json(const Polytope& p) {
  switch (p.kind()) {
    case PolytopeKind::Box: {
      ordered_json axes = ordered_json::array();
      for (Eigen::Index c = 0; c < p.box_frame().cols(); ++c)
        axes.push_back(vector_to_json(p.box_frame().col(c)));
      return ordered_json{{"family", "box"},
                          {"center", vector_to_json(p.box_center())},
                          {"axes", std::move(axes)},
                          {"half_lengths", vector_to_json(p.box_half_lengths())}};
    }
    case PolytopeKind::Simplex: {
      ordered_json verts = ordered_json::array();
      for (Eigen::Index c = 0; c < p.simplex_vertices().cols(); ++c)
        verts.push_back(vector_to_json(p.simplex_vertices().col(c)));
      return ordered_json{{"family", "simplex"}, {"vertices", std::move(verts)}};
    }
    case PolytopeKind::Product:
    default: {
      return ordered_json{{"family", "product"},
                          {"first", polytope_to_json(p.product_first())},
                          {"second", polytope_to_json(p.product_second())},
                          {"rotation", matrix_to_json(p.product_rotation())},
                          {"translation", vector_to_json(p.product_translation())}};
    }
  }
}

inline Polytope polytope_from_json(const ordered_json& j) {
  std::string family = j.at("family").get<std::string>();
  if (family == "box") {
    Eigen::VectorXd center = vector_from_json(j.at("center"));
    const auto& axes = j.at("axes");
    Eigen::MatrixXd frame(center.size(), static_cast<Eigen::Index>(axes.size()));
    for (Eigen::Index c = 0; c < frame.cols(); ++c)
      frame.col(c) = vector_from_json(axes[static_cast<std::size_t>(c)]);
    return Polytope::box(std::move(center), std::move(frame), vector_from_json(j.at("half_lengths")));
  }
  if (family == "simplex") {
    const auto& verts = j.at("vertices");
    if (verts.empty()) throw std::invalid_argument("polytope_from_json: simplex needs vertices");
    Eigen::VectorXd v0 = vector_from_json(verts[0]);
    Eigen::MatrixXd m(v0.size(), static_cast<Eigen::Index>(verts.size()));
    m.col(0) = v0;
    for (Eigen::Index c = 1; c < m.cols(); ++c) m.col(c) = vector_from_json(verts[static_cast<std::size_t>(c)]);
    return Polytope::simplex(std::move(m));
  }
  if (family == "product") {
    Polytope base = Polytope::product(polytope_from_json(j.at("first")), polytope_from_json(j.at("second")));
    Eigen::VectorXd t = vector_from_json(j.at("translation"));
    Eigen::MatrixXd q = matrix_from_json(j.at("rotation"), t.size(), t.size());
    return base.transformed(q, t);
  }
  throw std::invalid_argument("polytope_from_json: unknown family '" + family + "'");
}

}  // namespace intgeo
