#include "nlclaw/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nlclaw {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

void write_snapshot(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("write_snapshot: cannot open " + path);
    char header[128];
    std::snprintf(header, sizeof header, "NLCLAW-FIELD v1 dim=%d n=%d L=%.17g\n",
                  f.grid.dim, f.grid.n, f.grid.length);
    out << header;
    out.write(reinterpret_cast<const char*>(f.values.data()),
              std::streamsize(f.values.size() * sizeof(double)));
    if (!out) throw error("write_snapshot: short write to " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("read_snapshot: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw error("read_snapshot: missing header in " + path);
    int dim = 0, n = 0;
    double length = 0.0;
    if (std::sscanf(header.c_str(), "NLCLAW-FIELD v1 dim=%d n=%d L=%lf", &dim, &n,
                    &length) != 3)
        throw error("read_snapshot: bad header in " + path + ": " + header);
    Field f(make_grid(dim, n, length));
    in.read(reinterpret_cast<char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
    if (std::size_t(in.gcount()) != f.values.size() * sizeof(double))
        throw error("read_snapshot: truncated payload in " + path);
    return f;
}

}  // namespace nlclaw
