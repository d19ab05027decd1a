#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "ecrm/additive.hpp"
#include "ecrm/common.hpp"
#include "ecrm/flow_network.hpp"
#include "ecrm/hierarchy.hpp"
#include "ecrm/model.hpp"
#include "ecrm/output_space.hpp"

namespace ecrm {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Whitespace-separated rows of decimal numbers, one sample per line. Every
/// row must have the same length; errors name the file and line.
Matrix read_matrix(std::istream& in, const std::string& name = "<stream>");
Matrix load_matrix(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& M);
void save_matrix(const std::string& path, const Matrix& M);

Matrix load_features(const std::string& path);
/// 0/1 entries.
Matrix load_binary_labels(const std::string& path);
/// -1/+1 entries, one per line.
Matrix load_sign_labels(const std::string& path);
/// 1-based rank vectors.
Matrix load_permutations(const std::string& path);
/// Nonnegative reals.
Matrix load_flows(const std::string& path);
/// Loads labels for a space and checks that every row is feasible.
Matrix load_labels(const std::string& path, const OutputSpace& space);

/// One `parent child` pair per line, 0-based. The node count is 1 + max id,
/// or N when the first line reads `nodes N`.
HierarchyDag read_hierarchy(std::istream& in, const std::string& name = "<stream>");
HierarchyDag load_hierarchy(const std::string& path);
void write_hierarchy(std::ostream& out, const HierarchyDag& dag);

/// `nodes N arcs M`, then M lines `tail head`, then N lines `node b`.
FlowNetwork read_network(std::istream& in, const std::string& name = "<stream>");
FlowNetwork load_network(const std::string& path);
void write_network(std::ostream& out, const FlowNetwork& net);
void save_network(const std::string& path, const FlowNetwork& net);

/// ECRM-MODEL text format; the factorization is recomputed on load.
void write_model(std::ostream& out, const TrainedModel& model);
void write_model(std::ostream& out, const AdditiveModel& model);
void save_model(const std::string& path, const TrainedModel& model);
void save_model(const std::string& path, const AdditiveModel& model);

using AnyModel = std::variant<TrainedModel, AdditiveModel>;
AnyModel read_model(std::istream& in, const std::string& name = "<stream>");
AnyModel load_model(const std::string& path);

}  // namespace ecrm
