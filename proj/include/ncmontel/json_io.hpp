#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/free_poly.hpp"
#include "ncmontel/graded_function.hpp"
#include "ncmontel/hereditary.hpp"
#include "ncmontel/nc_points.hpp"
#include "ncmontel/uniqueness.hpp"
#include "ncmontel/wandering.hpp"

namespace ncmontel {

using nlohmann::json;

// Matrices travel as { "rows", "cols", "re": [...], "im": [...] } with
// row-major coefficient arrays.

inline json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)},
              {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != rows * cols || static_cast<int>(im.size()) != rows * cols) {
    throw InvalidInputError("matrix_from_json: coefficient arrays have wrong length");
  }
  ComplexMatrix m(rows, cols);
  int idx = 0;
  for (int i = 0; i < rows; ++i) {
    for (int jcol = 0; jcol < cols; ++jcol, ++idx) {
      m(i, jcol) = Complex(re[idx].get<double>(), im[idx].get<double>());
    }
  }
  if (!m.is_finite()) throw InvalidInputError("matrix_from_json: non-finite entries");
  return m;
}

inline json tuple_to_json(const MatrixTuple& t) {
  json matrices = json::array();
  for (int jvar = 0; jvar < t.d(); ++jvar) matrices.push_back(matrix_to_json(t.coordinate(jvar)));
  return json{{"d", t.d()}, {"n", t.grading()}, {"matrices", std::move(matrices)}};
}

inline MatrixTuple tuple_from_json(const json& j) {
  const int d = j.at("d").get<int>();
  const int n = j.at("n").get<int>();
  std::vector<ComplexMatrix> ms;
  for (const auto& mj : j.at("matrices")) ms.push_back(matrix_from_json(mj));
  if (static_cast<int>(ms.size()) != d) {
    throw InvalidInputError("tuple_from_json: matrix count != d");
  }
  MatrixTuple t(std::move(ms));
  if (t.grading() != n) throw InvalidInputError("tuple_from_json: grading mismatch");
  return t;
}

inline json sample_set_to_json(const SampleSet& s) {
  json out = json::array();
  for (int i = 0; i < s.size(); ++i) out.push_back(tuple_to_json(s.point(i)));
  return out;
}

inline SampleSet sample_set_from_json(const json& j, SampleRole role) {
  std::vector<MatrixTuple> points;
  for (const auto& pj : j) points.push_back(tuple_from_json(pj));
  return SampleSet(std::move(points), role);
}

inline json poly_matrix_to_json(const FreePolyMatrix& p) {
  json rows = json::array();
  for (int jr = 0; jr < p.j_rows(); ++jr) {
    json row = json::array();
    for (int lc = 0; lc < p.l_cols(); ++lc) {
      json terms = json::array();
      for (const auto& [w, c] : p.at(jr, lc).terms()) {
        terms.push_back(json{{"word", w.letters}, {"re", c.real()}, {"im", c.imag()}});
      }
      row.push_back(std::move(terms));
    }
    rows.push_back(std::move(row));
  }
  return json{{"d", p.d()}, {"J", p.j_rows()}, {"L", p.l_cols()}, {"entries", std::move(rows)}};
}

inline FreePolyMatrix poly_matrix_from_json(const json& j) {
  const int d = j.at("d").get<int>();
  const int j_rows = j.at("J").get<int>();
  const int l_cols = j.at("L").get<int>();
  const auto& rows = j.at("entries");
  if (static_cast<int>(rows.size()) != j_rows) {
    throw InvalidInputError("poly_matrix_from_json: row count != J");
  }
  std::vector<FreePoly> entries;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != l_cols) {
      throw InvalidInputError("poly_matrix_from_json: column count != L");
    }
    for (const auto& terms : row) {
      FreePoly p;
      for (const auto& t : terms) {
        Word w;
        for (const auto& letter : t.at("word")) w.letters.push_back(letter.get<int>());
        p.add_term(w, Complex(t.at("re").get<double>(), t.at("im").get<double>()));
      }
      entries.push_back(std::move(p));
    }
  }
  return FreePolyMatrix(d, j_rows, l_cols, std::move(entries));
}

/// Exchange format for one sampled graded function.
inline json sampled_function_to_json(int truncation, int d, const SampleSet& points,
                                     const std::vector<ComplexMatrix>& values) {
  json samples = json::array();
  for (int i = 0; i < points.size(); ++i) {
    samples.push_back(json{{"point", tuple_to_json(points.point(i))},
                           {"value", matrix_to_json(values[i])}});
  }
  return json{{"M", truncation}, {"d", d}, {"samples", std::move(samples)}};
}

/// Sequence tables use the sampled-function shape with a per-point list of K
/// values plus the sequence length and the declared bound.
inline json sequence_samples_to_json(const SequenceSamples& s) {
  json samples = json::array();
  for (int i = 0; i < s.point_count(); ++i) {
    json vals = json::array();
    for (int k = 0; k < s.sequence_length(); ++k) vals.push_back(matrix_to_json(s.value(k, i)));
    samples.push_back(json{{"point", tuple_to_json(s.points().point(i))},
                           {"values", std::move(vals)}});
  }
  return json{{"M", s.truncation()}, {"d", s.points().d()}, {"K", s.sequence_length()},
              {"B", s.bound()},      {"samples", std::move(samples)}};
}

inline SequenceSamples sequence_samples_from_json(const json& j,
                                                  SampleRole role = SampleRole::DenseGrid) {
  const int truncation = j.at("M").get<int>();
  const int k_total = j.at("K").get<int>();
  const double bound = j.at("B").get<double>();
  std::vector<MatrixTuple> points;
  std::vector<std::vector<ComplexMatrix>> values(k_total);
  for (const auto& sj : j.at("samples")) {
    points.push_back(tuple_from_json(sj.at("point")));
    const auto& vals = sj.at("values");
    if (static_cast<int>(vals.size()) != k_total) {
      throw InvalidInputError("sequence_samples_from_json: value list length != K");
    }
    for (int k = 0; k < k_total; ++k) values[k].push_back(matrix_from_json(vals[k]));
  }
  return SequenceSamples(SampleSet(std::move(points), role), truncation, std::move(values),
                         bound);
}

/// Function indices are 1-based on the wire, matching the k in the trace CSV.
inline json wandering_result_to_json(const WanderingResult& r) {
  json unitaries = json::array();
  for (const auto& u : r.unitaries) unitaries.push_back(matrix_to_json(u));
  json subsequence = json::array();
  for (int k : r.subsequence) subsequence.push_back(k + 1);
  json limits = json::array();
  for (const auto& l : r.limits) limits.push_back(matrix_to_json(l));
  return json{{"unitaries", std::move(unitaries)},
              {"subsequence", std::move(subsequence)},
              {"limits", std::move(limits)},
              {"cauchy_residual", r.cauchy_residual},
              {"containment_residual", r.containment_residual},
              {"converged", r.converged}};
}

inline json nc_check_report_to_json(const NcCheckReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    cases.push_back(json{{"kind", c.kind},
                         {"detail", c.detail},
                         {"residual", c.residual},
                         {"error", c.error}});
  }
  return json{{"max_direct_sum_residual", r.max_direct_sum_residual},
              {"max_similarity_residual", r.max_similarity_residual},
              {"tolerance", r.tolerance},
              {"passed", r.passed},
              {"cases", std::move(cases)}};
}

inline json norm_upgrade_report_to_json(const NormUpgradeReport& r) {
  return json{{"probe_oscillation", r.probe_oscillation},
              {"gram_oscillation", r.gram_oscillation},
              {"norm_oscillation", r.norm_oscillation},
              {"tolerance", r.tolerance},
              {"probes_span", r.probes_span},
              {"hypotheses_hold", r.hypotheses_hold},
              {"tail_start", r.tail_start + 1},
              {"verdict", r.verdict},
              {"witness", r.witness},
              {"probe_inventory", r.probe_inventory}};
}

inline json closure_recover_report_to_json(const ClosureRecoverResult& r, ConeMode mode) {
  json limits = json::array();
  for (const auto& l : r.limits) limits.push_back(matrix_to_json(l));
  return json{{"mode", to_string(mode)},
              {"residual", r.residual},
              {"invariance_residual", r.invariance_residual},
              {"pairs_evaluated", static_cast<int>(r.pairs.size())},
              {"cauchy_residual", r.wandering.cauchy_residual},
              {"containment_residual", r.wandering.containment_residual},
              {"converged", r.wandering.converged},
              {"limits", std::move(limits)}};
}

// ---- CSV traces ------------------------------------------------------------

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// One row per (point, function): distance of the transformed value to the
/// per-point limit estimate. k is 1-based.
inline std::string wandering_trace_csv(const WanderingResult& r) {
  std::string out = "point_index,k,residual_to_limit\n";
  for (size_t i = 0; i < r.limits.size(); ++i) {
    for (size_t k = 0; k < r.transformed.size(); ++k) {
      out += std::to_string(i + 1) + "," + std::to_string(k + 1) + "," +
             csv_double(operator_norm(r.transformed[k][i] - r.limits[i])) + "\n";
    }
  }
  return out;
}

inline std::string pair_distance_csv(const ClosureRecoverResult& r) {
  std::string out = "pair_index,distance\n";
  for (size_t p = 0; p < r.pair_distances.size(); ++p) {
    out += std::to_string(p + 1) + "," + csv_double(r.pair_distances[p]) + "\n";
  }
  return out;
}

/// Writes through a temp file and renames, so readers never see a torn file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("atomic_write_file: cannot open " + tmp.string());
    out << content;
    if (!out) throw Error("atomic_write_file: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ncmontel
