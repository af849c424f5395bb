#include "hsoc/errors.hpp"
#include "hsoc/mesh.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace hsoc {
namespace {

// Non-empty lines with comments stripped, tagged with 1-based line numbers.
struct TokenLine {
  std::size_t number;
  std::vector<std::string> tokens;
};

struct LineReader {
  std::vector<TokenLine> lines;
  std::size_t total_lines = 0;
  std::size_t cursor = 0;

  explicit LineReader(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      ++total_lines;
      if (auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      std::istringstream in{std::string(line)};
      TokenLine tl{total_lines, {}};
      for (std::string tok; in >> tok;) tl.tokens.push_back(tok);
      if (!tl.tokens.empty()) lines.push_back(std::move(tl));
      pos = end + 1;
    }
  }

  const TokenLine& next(const char* what) {
    if (cursor >= lines.size())
      throw ParseError(std::string("unexpected end of file, expected ") + what,
                       total_lines + 1);
    return lines[cursor++];
  }
};

template <typename T>
T parse_number(const TokenLine& line, std::size_t k, const char* what) {
  if (k >= line.tokens.size())
    throw ParseError(std::string("missing ") + what, line.number);
  const std::string& tok = line.tokens[k];
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(std::string("bad ") + what + " '" + tok + "'", line.number);
  return value;
}

} // namespace

Mesh2D import_triangle_mesh(std::string_view node_text, std::string_view ele_text) {
  LineReader nodes(node_text);
  const TokenLine& header = nodes.next("node header");
  const long count = parse_number<long>(header, 0, "vertex count");
  const int dim = header.tokens.size() > 1 ? parse_number<int>(header, 1, "dimension") : 2;
  const int attributes =
      header.tokens.size() > 2 ? parse_number<int>(header, 2, "attribute count") : 0;
  const int markers = header.tokens.size() > 3 ? parse_number<int>(header, 3, "marker count") : 0;
  if (count < 3) throw ParseError("need at least 3 vertices", header.number);
  if (dim != 2) throw ParseError("only dimension 2 is supported", header.number);
  if (markers != 0 && markers != 1)
    throw ParseError("boundary marker count must be 0 or 1", header.number);

  std::vector<Vec2> vertices(count);
  std::vector<bool> flags(count);
  long base = 0;
  for (long i = 0; i < count; ++i) {
    const TokenLine& line = nodes.next("vertex line");
    const long index = parse_number<long>(line, 0, "vertex index");
    if (i == 0) {
      if (index != 0 && index != 1) throw ParseError("first vertex index must be 0 or 1", line.number);
      base = index;
    }
    if (index != i + base) throw ParseError("vertex index out of sequence", line.number);
    vertices[i] = Vec2(parse_number<double>(line, 1, "x coordinate"),
                       parse_number<double>(line, 2, "y coordinate"));
    if (markers == 1)
      // Triangle marks hull vertices with 1; other values tag interior segments.
      flags[i] = parse_number<long>(line, 3 + attributes, "boundary marker") == 1;
  }
  if (nodes.cursor != nodes.lines.size())
    throw ParseError("more vertex lines than announced", nodes.lines[nodes.cursor].number);

  LineReader eles(ele_text);
  const TokenLine& eheader = eles.next("element header");
  const long ntri = parse_number<long>(eheader, 0, "triangle count");
  const int per = eheader.tokens.size() > 1 ? parse_number<int>(eheader, 1, "nodes per triangle") : 3;
  if (per != 3) throw ParseError("only 3-node triangles are supported", eheader.number);
  if (ntri < 1) throw ParseError("need at least one triangle", eheader.number);

  std::vector<std::array<int, 3>> triangles(ntri);
  for (long t = 0; t < ntri; ++t) {
    const TokenLine& line = eles.next("triangle line");
    parse_number<long>(line, 0, "triangle index");
    for (int k = 0; k < 3; ++k) {
      const long v = parse_number<long>(line, 1 + k, "vertex reference") - base;
      if (v < 0 || v >= count)
        throw ParseError("triangle references missing vertex " + line.tokens[1 + k], line.number);
      triangles[t][k] = static_cast<int>(v);
    }
  }
  if (eles.cursor != eles.lines.size())
    throw ParseError("more triangle lines than announced", eles.lines[eles.cursor].number);

  if (markers == 1) return Mesh2D(std::move(vertices), std::move(triangles), std::move(flags));
  return Mesh2D(std::move(vertices), std::move(triangles));
}

TriangleFiles export_triangle_mesh(const Mesh2D& mesh) {
  TriangleFiles out;
  std::ostringstream node;
  char buf[128];
  node << mesh.num_vertices() << " 2 0 1\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2& p = mesh.vertices()[v];
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %d\n", v + 1, p.x(), p.y(),
                  mesh.is_boundary(static_cast<int>(v)) ? 1 : 0);
    node << buf;
  }
  std::ostringstream ele;
  ele << mesh.num_triangles() << " 3 0\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    ele << t + 1 << ' ' << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
  }
  out.node = node.str();
  out.ele = ele.str();
  return out;
}

} // namespace hsoc
