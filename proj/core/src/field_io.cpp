#include "mfgplan/field_io.hpp"

#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "mfgplan/error.hpp"

namespace mfgplan {

namespace {

constexpr const char* kMagic = "mfgfield";

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

void put_le(std::ostream& out, std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_all(std::ostream& out, const TorusGrid& grid, TimeLayout layout, const std::vector<const ScalarField*>& parts,
               const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\n=") != std::string::npos) {
    throw Error("write_field: field name must be non-empty without spaces or '='");
  }
  out << kMagic << " version=1 dim=" << grid.dim() << " nx=" << grid.nx() << " ny=" << grid.ny() << " nt=" << grid.nt()
      << " T=" << format_double(grid.horizon()) << " stagger=" << (layout == TimeLayout::nodes ? "nodes" : "intervals")
      << " components=" << parts.size() << " name=" << name << " byte_order=little\n";
  for (const ScalarField* p : parts) put_le(out, p->values());
  if (!out) throw Error("write_field: write failed");
}

int parse_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw Error("read_field: header is missing '" + key + "'");
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error("read_field: header value " + key + "=" + it->second + " is not an integer");
  }
}

std::string open_error(const std::string& path, const char* what) {
  return std::string(what) + ": cannot open '" + path + "': " + std::strerror(errno);
}

}  // namespace

TorusGrid FieldHeader::grid() const { return TorusGrid::make(dim, nx, dim == 1 ? 1 : ny, nt, horizon); }

std::size_t FieldHeader::value_count() const {
  const std::size_t slices = static_cast<std::size_t>(stagger == TimeLayout::nodes ? nt + 1 : nt);
  return static_cast<std::size_t>(components) * slices * static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
}

void write_field(std::ostream& out, const ScalarField& field, const std::string& name) {
  write_all(out, field.grid(), field.layout(), {&field}, name);
}

void write_field(std::ostream& out, const VectorField& field, const std::string& name) {
  std::vector<const ScalarField*> parts;
  for (int a = 0; a < field.components(); ++a) parts.push_back(&field[a]);
  write_all(out, field.grid(), field.layout(), parts, name);
}

void write_field(const std::string& path, const ScalarField& field, const std::string& name) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(open_error(path, "write_field"));
  write_field(out, field, name);
}

void write_field(const std::string& path, const VectorField& field, const std::string& name) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(open_error(path, "write_field"));
  write_field(out, field, name);
}

FieldData read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("read_field: empty input, expected a header line");
  std::istringstream tokens(line);
  std::string magic;
  tokens >> magic;
  if (magic != kMagic) throw Error("read_field: not a field file (header must start with 'mfgfield')");
  std::map<std::string, std::string> kv;
  for (std::string tok; tokens >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error("read_field: malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  if (parse_int(kv, "version") != 1) throw Error("read_field: unsupported version " + kv["version"]);
  const auto order = kv.find("byte_order");
  if (order == kv.end()) throw Error("read_field: header is missing 'byte_order'");
  if (order->second != "little") throw Error("read_field: unknown byte order '" + order->second + "'");

  FieldData data;
  FieldHeader& h = data.header;
  h.dim = parse_int(kv, "dim");
  h.nx = parse_int(kv, "nx");
  h.ny = parse_int(kv, "ny");
  h.nt = parse_int(kv, "nt");
  h.components = parse_int(kv, "components");
  const auto t = kv.find("T");
  if (t == kv.end()) throw Error("read_field: header is missing 'T'");
  try {
    h.horizon = std::stod(t->second);
  } catch (const std::exception&) {
    throw Error("read_field: header value T=" + t->second + " is not a number");
  }
  const auto stagger = kv.find("stagger");
  if (stagger == kv.end()) throw Error("read_field: header is missing 'stagger'");
  if (stagger->second == "nodes") {
    h.stagger = TimeLayout::nodes;
  } else if (stagger->second == "intervals") {
    h.stagger = TimeLayout::intervals;
  } else {
    throw Error("read_field: unknown stagger '" + stagger->second + "'");
  }
  h.name = kv.count("name") ? kv["name"] : std::string();
  if (h.components < 1 || h.components > 2) throw Error("read_field: components must be 1 or 2");
  if (h.dim == 1 && h.ny != 1) throw Error("read_field: dim=1 requires ny=1");
  const TorusGrid grid = h.grid();

  const std::size_t expected = h.value_count() * 8;
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != expected) {
    std::ostringstream msg;
    msg << "read_field: payload size mismatch, header implies " << expected << " bytes but found " << bytes.size();
    throw Error(msg.str());
  }
  const std::size_t per = h.value_count() / static_cast<std::size_t>(h.components);
  for (int c = 0; c < h.components; ++c) {
    ScalarField f(grid, h.stagger);
    auto dst = f.values();
    for (std::size_t i = 0; i < per; ++i) {
      std::uint64_t bits = 0;
      const std::size_t base = (static_cast<std::size_t>(c) * per + i) * 8;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[base + static_cast<std::size_t>(b)])) << (8 * b);
      }
      dst[i] = std::bit_cast<double>(bits);
    }
    data.components.push_back(std::move(f));
  }
  return data;
}

FieldData read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(open_error(path, "read_field"));
  try {
    return read_field(in);
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " (" + path + ")");
  }
}

ScalarField read_scalar_field(const std::string& path) {
  FieldData d = read_field(path);
  if (d.header.components != 1) throw Error("read_field: '" + path + "' holds a vector field, expected a scalar");
  return std::move(d.components.front());
}

VectorField read_vector_field(const std::string& path) {
  FieldData d = read_field(path);
  if (d.header.components != d.header.dim) {
    throw Error("read_field: '" + path + "' does not hold one component per spatial axis");
  }
  VectorField out(d.header.grid(), d.header.stagger);
  for (int a = 0; a < d.header.components; ++a) out[a] = std::move(d.components[static_cast<std::size_t>(a)]);
  return out;
}

}  // namespace mfgplan
