#include "sgrecon/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sgrecon {

namespace {

[[noreturn]] void fail(const std::string& name, const std::string& what) {
  throw std::runtime_error(name + ": " + what);
}

// Reads one whitespace-delimited ASCII token from a binary stream.
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF && std::isspace(c)) {
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  return token;
}

int parse_positive_int(const std::string& token, const std::string& name, const char* what) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    fail(name, std::string("malformed ") + what);
  }
  if (used != token.size() || value <= 0) fail(name, std::string("malformed ") + what);
  return value;
}

float swap_float(float f) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
  const std::uint32_t swapped = ((bits & 0xff) << 24) | ((bits & 0xff00) << 8) |
                                ((bits >> 8) & 0xff00) | (bits >> 24);
  return std::bit_cast<float>(swapped);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  return in;
}

std::ofstream create_binary(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot create file");
  return out;
}

}  // namespace

FloatMap read_pfm(std::istream& in, const std::string& name) {
  const std::string magic = next_token(in);
  FloatMap map;
  if (magic == "Pf") {
    map.channels = 1;
  } else if (magic == "PF") {
    map.channels = 3;
  } else {
    fail(name, "not a PFM file (expected Pf or PF header)");
  }
  map.width = parse_positive_int(next_token(in), name, "width");
  map.height = parse_positive_int(next_token(in), name, "height");

  const std::string scale_token = next_token(in);
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_token, &used);
    if (used != scale_token.size()) fail(name, "malformed scale");
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception&) {
    fail(name, "malformed scale");
  }
  if (scale == 0.0) fail(name, "zero scale");
  const bool little_endian = scale < 0.0;

  const std::size_t count = static_cast<std::size_t>(map.width) *
                            static_cast<std::size_t>(map.height) *
                            static_cast<std::size_t>(map.channels);
  map.data.resize(count);
  // PFM rows run bottom-to-top; land them top-to-bottom in memory.
  const std::size_t row_floats = static_cast<std::size_t>(map.width) * map.channels;
  for (int v = map.height - 1; v >= 0; --v) {
    char* dst = reinterpret_cast<char*>(map.data.data() + static_cast<std::size_t>(v) * row_floats);
    if (!in.read(dst, static_cast<std::streamsize>(row_floats * sizeof(float)))) {
      fail(name, "truncated payload");
    }
  }
  if (!little_endian) {
    for (float& f : map.data) f = swap_float(f);
  }
  return map;
}

FloatMap read_pfm_file(const std::string& path) {
  auto in = open_binary(path);
  return read_pfm(in, path);
}

void write_pfm(std::ostream& out, const FloatMap& map) {
  if (map.channels != 1 && map.channels != 3) {
    throw std::invalid_argument("float map must have 1 or 3 channels");
  }
  if (map.width <= 0 || map.height <= 0 ||
      map.data.size() != static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height) *
                             static_cast<std::size_t>(map.channels)) {
    throw std::invalid_argument("float map dimensions do not match its data");
  }
  out << (map.channels == 1 ? "Pf" : "PF") << '\n' << map.width << ' ' << map.height << '\n'
      << "-1.0" << '\n';
  const std::size_t row_floats = static_cast<std::size_t>(map.width) * map.channels;
  for (int v = map.height - 1; v >= 0; --v) {
    const char* src =
        reinterpret_cast<const char*>(map.data.data() + static_cast<std::size_t>(v) * row_floats);
    out.write(src, static_cast<std::streamsize>(row_floats * sizeof(float)));
  }
  if (!out) throw std::runtime_error("failed to write float map");
}

void write_pfm_file(const std::string& path, const FloatMap& map) {
  auto out = create_binary(path);
  write_pfm(out, map);
}

MaskImage read_pgm_mask(std::istream& in, const std::string& name) {
  // PNM headers allow '#' comments between tokens.
  const auto token = [&] {
    std::string t = next_token(in);
    while (!t.empty() && t[0] == '#') {
      std::string line;
      std::getline(in, line);
      t = next_token(in);
    }
    return t;
  };
  if (token() != "P5") fail(name, "not a binary PGM file (expected P5 header)");
  MaskImage img;
  img.width = parse_positive_int(token(), name, "width");
  img.height = parse_positive_int(token(), name, "height");
  const int maxval = parse_positive_int(token(), name, "maxval");
  if (maxval > 255) fail(name, "16-bit masks unsupported");

  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  std::vector<char> raw(count);
  if (!in.read(raw.data(), static_cast<std::streamsize>(count))) fail(name, "truncated payload");
  img.mask.resize(count);
  for (std::size_t i = 0; i < count; ++i) img.mask[i] = raw[i] != 0 ? 1 : 0;
  return img;
}

MaskImage read_pgm_mask_file(const std::string& path) {
  auto in = open_binary(path);
  return read_pgm_mask(in, path);
}

void write_pgm_mask(std::ostream& out, const MaskImage& mask) {
  if (mask.width <= 0 || mask.height <= 0 ||
      mask.mask.size() != static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height)) {
    throw std::invalid_argument("mask dimensions do not match its data");
  }
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  for (std::uint8_t m : mask.mask) out.put(m ? static_cast<char>(255) : 0);
  if (!out) throw std::runtime_error("failed to write mask");
}

void write_pgm_mask_file(const std::string& path, const MaskImage& mask) {
  auto out = create_binary(path);
  write_pgm_mask(out, mask);
}

CameraIntrinsics read_intrinsics(std::istream& in, const std::string& name) {
  CameraIntrinsics k;
  bool have_f = false, have_cu = false, have_cv = false;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
      while (!s.empty() && is_space(s.front())) s.erase(s.begin());
      while (!s.empty() && is_space(s.back())) s.pop_back();
      return s;
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail(name, "expected key=value, got \"" + stripped + "\"");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value_text = trim(stripped.substr(eq + 1));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(value_text, &used);
      if (used != value_text.size()) fail(name, "malformed value for " + key);
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception&) {
      fail(name, "malformed value for " + key);
    }
    if (key == "f") {
      k.f = value;
      have_f = true;
    } else if (key == "cu") {
      k.cu = value;
      have_cu = true;
    } else if (key == "cv") {
      k.cv = value;
      have_cv = true;
    } else {
      fail(name, "unknown intrinsics key: " + key);
    }
  }
  if (!have_f) fail(name, "intrinsics missing key: f");
  if (!have_cu) fail(name, "intrinsics missing key: cu");
  if (!have_cv) fail(name, "intrinsics missing key: cv");
  if (!(k.f > 0.0)) fail(name, "focal length must be positive");
  return k;
}

CameraIntrinsics read_intrinsics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  return read_intrinsics(in, path);
}

void write_obj_mesh(std::ostream& out, const PixelDomain& domain, const std::vector<double>& z,
                    bool perspective, const CameraIntrinsics* intrinsics) {
  if (z.size() != static_cast<std::size_t>(domain.size())) {
    throw std::invalid_argument("depth length does not match the domain");
  }
  if (perspective && intrinsics == nullptr) {
    throw std::invalid_argument("perspective mesh export requires intrinsics");
  }
  char buf[96];
  for (int i = 0; i < domain.size(); ++i) {
    const Pixel p = domain.pixel_of(i);
    const double depth = z[static_cast<std::size_t>(i)];
    double x, y;
    if (perspective) {
      x = (p.u - intrinsics->cu) * depth / intrinsics->f;
      y = (p.v - intrinsics->cv) * depth / intrinsics->f;
    } else {
      x = p.u;
      y = p.v;
    }
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", x, y, depth);
    out << buf;
  }
  // OBJ indices are 1-based and follow the domain's foreground order.
  for (int v = 0; v + 1 < domain.height(); ++v) {
    for (int u = 0; u + 1 < domain.width(); ++u) {
      const int a = domain.index_of(u, v);
      const int b = domain.index_of(u + 1, v);
      const int c = domain.index_of(u, v + 1);
      const int d = domain.index_of(u + 1, v + 1);
      const int present = (a >= 0) + (b >= 0) + (c >= 0) + (d >= 0);
      if (present == 4) {
        out << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << '\n';
        out << "f " << b + 1 << ' ' << d + 1 << ' ' << c + 1 << '\n';
      } else if (present == 3) {
        int tri[3];
        int t = 0;
        for (int idx : {a, b, d, c}) {  // corner order keeps a consistent winding
          if (idx >= 0) tri[t++] = idx + 1;
        }
        out << "f " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("failed to write mesh");
}

}  // namespace sgrecon
