#pragma once

// Semantics-preserving rewrites: swapping adjacent disjoint gates, postponing
// gate sets, and squeezing long paths of a formula under a fixed assignment
// of the variables outside one block.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qf/circuit.hpp"

namespace qf {

// Swaps the gates at positions i and j = i + 1.
Circuit commute_disjoint(const Circuit& c, std::size_t i, std::size_t j);

// Moves the gates at the given positions to just after the gate currently at
// after_position, keeping their relative order. Every other gate they pass
// must act on disjoint wires, otherwise PreconditionError names it.
Circuit postpone_gates(const Circuit& c, std::span<const std::size_t> positions,
                       std::size_t after_position);

// F_tau: variables outside the block become constants. tau lists the values
// of the out-of-block variables in increasing index order.
Circuit substitute(const Circuit& f, std::span<const int> block,
                   std::span<const std::uint8_t> tau);

inline constexpr const char* kSqueezeTag = "SQUEEZE";
inline constexpr const char* kPrepTag = "PREP";

struct PathSegment {
  int start_gate = -1;         // id of g1, -1 when the segment starts at an input
  int start_wire = -1;         // that input wire
  std::vector<int> interior;   // ids of g2 .. g_{m-1}, bottom to top
  int end_gate = -1;           // id of g_m, -1 when the segment reaches the output
  std::size_t m = 2;
  std::size_t head_qubits = 1;  // path qubits entering the squeezed gate
  std::vector<int> companions;  // Q_pi: constant input wires feeding the region
  std::vector<int> side_gates;  // gates of the constant subtrees feeding the region
  std::vector<int> postponed;   // M_pi: dead gates fed by the region

  bool squeezable() const noexcept { return m > 2; }
};

struct PathDecomposition {
  std::vector<int> block;
  std::vector<int> sigma_wires;   // input wires labeled with block variables
  std::vector<WirePath> paths;    // P_j, one per wire of sigma_wires
  std::vector<int> intersections; // G_j, gate ids in time order
  std::vector<PathSegment> segments;  // ordered by their top gate's time
  std::size_t s_j = 0;
};

// Throws NotFormulaError, or DimensionError for a tau of the wrong length.
PathDecomposition decompose_paths(const Circuit& f, std::span<const int> block,
                                  std::span<const std::uint8_t> tau);
// Same on an already substituted formula.
PathDecomposition decompose_substituted(const Circuit& f_tau, std::span<const int> block);

nlohmann::ordered_json segment_to_json(const PathSegment& pi);
nlohmann::ordered_json decomposition_to_json(const PathDecomposition& d);

// F_tau with every M_pi gate moved past the last gate of the circuit.
Circuit postponed_form(const Circuit& f_tau, const PathDecomposition& decomp);

struct SqueezeData {
  std::size_t head_qubits = 0;
  std::size_t fresh_qubits = 0;
  std::size_t env_dim = 0;    // coordinates of the image vectors
  // images[alpha][c]: component of the region's output on head input alpha
  // where the exit and register qubits read c.
  std::vector<std::vector<CVector>> images;
  std::vector<CVector> basis;  // orthonormal, spans all images
  std::vector<std::vector<CVector>> lambda;  // lambda[alpha][c][j]

  std::size_t rank() const noexcept { return basis.size(); }
};

struct SqueezedPath {
  Gate gate;          // acts on head qubits followed by fresh |0> qubits
  Circuit fragment;   // the gate alone; head wires labeled x0.., output wire 0
  Circuit original;   // the replaced region; head inputs labeled x0..
  SqueezeData data;
};

SqueezedPath squeeze_path(const Circuit& f_tau, const PathSegment& pi,
                          const PathDecomposition& decomp);

struct SqueezeReport {
  Circuit circuit;  // F-bar_tau
  PathDecomposition decomposition;
  std::vector<std::size_t> ranks;          // d per squeezed segment
  std::vector<double> unitarity_residuals; // per replacement gate
  std::size_t size = 0;
  std::size_t squeezed = 0;
  bool changed = false;
};

// Size of F-bar_tau is at most kSqueezeSizeConstant * max(s_j, 1).
inline constexpr std::size_t kSqueezeSizeConstant = 3;

SqueezeReport squeeze_formula(const Circuit& f, std::span<const int> block,
                              std::span<const std::uint8_t> tau);

// True when a and b agree except in the matrices of SQUEEZE/PREP gates and
// the values of constant inputs.
bool same_outside_squeezed(const Circuit& a, const Circuit& b);

}  // namespace qf
