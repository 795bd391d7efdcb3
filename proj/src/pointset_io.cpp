#include "aggorient/pointset_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include <png.h>

#include "aggorient/error.hpp"

namespace aggorient::io {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw Error("csv line " + std::to_string(line) + ": cannot parse '" + t + "'");
  }
  return v;
}

// Reads the next whitespace-delimited PGM header token, skipping comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

PointSet load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mask " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw Error("unsupported PGM variant in " + path.string());
  const int width = std::stoi(pgm_token(in));
  const int height = std::stoi(pgm_token(in));
  const int maxval = std::stoi(pgm_token(in));
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error("malformed PGM header in " + path.string());
  }

  PointSet out;
  out.source_id = path.stem().string();
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      int v = 0;
      if (magic == "P2") {
        const std::string tok = pgm_token(in);
        if (tok.empty()) throw Error("truncated PGM data in " + path.string());
        v = std::stoi(tok);
      } else if (maxval < 256) {
        const int ch = in.get();
        if (ch == EOF) throw Error("truncated PGM data in " + path.string());
        v = ch;
      } else {
        const int hi = in.get();
        const int lo = in.get();
        if (lo == EOF) throw Error("truncated PGM data in " + path.string());
        v = (hi << 8) | lo;
      }
      if (v != 0) out.points.emplace_back(r, c);
    }
  }
  return out;
}

PointSet load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error("cannot decode PNG " + path.string() + ": " + image.message);
  }
  PointSet out;
  out.source_id = path.stem().string();
  for (png_uint_32 r = 0; r < image.height; ++r)
    for (png_uint_32 c = 0; c < image.width; ++c)
      if (buffer[r * image.width + c] != 0) out.points.emplace_back(r, c);
  return out;
}

}  // namespace

PointSet read_csv(std::istream& in, std::string source_id) {
  PointSet out;
  out.source_id = std::move(source_id);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      std::string h;
      for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) h.push_back(ch);
      if (h != "x,y") throw Error("csv header must be 'x,y', got '" + line + "'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error("csv line " + std::to_string(lineno) + ": expected two fields");
    }
    out.points.emplace_back(parse_double(line.substr(0, comma), lineno),
                            parse_double(line.substr(comma + 1), lineno));
  }
  if (!header) throw Error("csv is empty");
  return out;
}

PointSet read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_csv(in, path.stem().string());
}

void write_csv(std::ostream& out, const PointSet& ps) {
  out << "x,y\n" << std::setprecision(17);
  for (const auto& p : ps.points) out << p.x() << ',' << p.y() << '\n';
}

void write_csv(const std::filesystem::path& path, const PointSet& ps) {
  std::ostringstream s;
  write_csv(s, ps);
  write_atomic(path, s.str());
}

PointSet load_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mask " + path.string());
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  in.close();
  if (sig[0] == 0x89 && sig[1] == 'P' && sig[2] == 'N' && sig[3] == 'G') return load_png(path);
  if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return load_pgm(path);
  throw Error("unrecognised mask format: " + path.string());
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace aggorient::io
