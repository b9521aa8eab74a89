#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfgplan/grid.hpp"

namespace mfgplan {

// On-disk field: one ASCII header line of space-separated key=value pairs,
//   mfgfield version=1 dim=1 nx=64 ny=1 nt=32 T=1 stagger=nodes components=1 name=m byte_order=little
// terminated by '\n', followed by components * slices * nx * ny little-endian
// IEEE-754 float64 values, component-major, then row-major over (t, x[, y]).
struct FieldHeader {
  int dim = 1;
  int nx = 0;
  int ny = 1;
  int nt = 0;
  double horizon = 1.0;
  TimeLayout stagger = TimeLayout::nodes;
  int components = 1;
  std::string name;

  TorusGrid grid() const;
  std::size_t value_count() const;
};

struct FieldData {
  FieldHeader header;
  std::vector<ScalarField> components;
};

void write_field(std::ostream& out, const ScalarField& field, const std::string& name);
void write_field(std::ostream& out, const VectorField& field, const std::string& name);
void write_field(const std::string& path, const ScalarField& field, const std::string& name);
void write_field(const std::string& path, const VectorField& field, const std::string& name);

// Throws mfgplan::Error on malformed headers, unknown byte order, and payload
// size mismatches (naming expected and actual byte counts).
FieldData read_field(std::istream& in);
FieldData read_field(const std::string& path);
ScalarField read_scalar_field(const std::string& path);
VectorField read_vector_field(const std::string& path);

}  // namespace mfgplan
