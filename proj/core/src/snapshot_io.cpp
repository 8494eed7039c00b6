#include "oseenlab/snapshot_io.hpp"

#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace oseenlab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot payload is written as raw little-endian complex128");

constexpr char kMagic[8] = {'O', 'S', 'L', 'S', 'N', 'A', 'P', '1'};
constexpr int kFormatVersion = 1;

void fail(const std::filesystem::path& file, const std::string& what) {
  throw std::runtime_error("snapshot " + file.string() + ": " + what);
}

}  // namespace

void save_snapshot(const std::filesystem::path& file, const VorticityState& w) {
  const Grid& g = w.grid;
  nlohmann::json header = {
      {"format", kFormatVersion},
      {"grid",
       {{"L_xi", g.L_xi},
        {"N_xi", g.N_xi},
        {"N_z", g.N_z},
        {"z_period", g.z_period},
        {"weight_m", g.weight_m}}},
      {"tau", w.tau},
      {"alpha", w.alpha},
      {"gauge", gauge_name(w.gauge)},
  };
  const std::string head = header.dump();

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(file, "cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t len = head.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  const std::streamsize slice_bytes =
      static_cast<std::streamsize>(sizeof(std::complex<double>)) * g.N_xi * g.N_xi;
  for (int c = 0; c < 3; ++c) {
    const SpectralField& f = w.component(c);
    for (int j = 0; j < f.ladder_size(); ++j) {
      out.write(reinterpret_cast<const char*>(f.slice(j).data()), slice_bytes);
    }
  }
  if (!out) fail(file, "write failed");
}

VorticityState load_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(file, "cannot open");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != std::string(kMagic, 8)) {
    fail(file, "bad magic (not a snapshot file)");
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len == 0 || len > (1u << 20)) fail(file, "bad header length");
  std::string head(len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(len));
  if (!in) fail(file, "truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(head);
  } catch (const nlohmann::json::exception& e) {
    fail(file, std::string("header parse: ") + e.what());
  }
  if (header.value("format", -1) != kFormatVersion) {
    fail(file, "unsupported format version");
  }

  Grid g;
  try {
    const nlohmann::json& jg = header.at("grid");
    g.L_xi = jg.at("L_xi").get<double>();
    g.N_xi = jg.at("N_xi").get<int>();
    g.N_z = jg.at("N_z").get<int>();
    g.z_period = jg.at("z_period").get<double>();
    g.weight_m = jg.at("weight_m").get<double>();
    g.validate();
    VorticityState w(g, header.at("tau").get<double>(),
                     header.at("alpha").get<double>(),
                     gauge_from_name(header.at("gauge").get<std::string>()));
    const std::streamsize slice_bytes =
        static_cast<std::streamsize>(sizeof(std::complex<double>)) * g.N_xi * g.N_xi;
    for (int c = 0; c < 3; ++c) {
      SpectralField& f = w.component(c);
      for (int j = 0; j < f.ladder_size(); ++j) {
        in.read(reinterpret_cast<char*>(f.slice(j).data()), slice_bytes);
      }
    }
    if (!in) fail(file, "truncated payload");
    in.peek();
    if (!in.eof()) fail(file, "trailing bytes after payload");
    return w;
  } catch (const nlohmann::json::exception& e) {
    fail(file, std::string("header fields: ") + e.what());
  }
  throw std::logic_error("unreachable");
}

void write_trajectory_csv(const std::filesystem::path& file,
                          const Trajectory& traj) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) fail(file, "cannot open for writing");
  out << "tau,norm_total,norm_planar,norm_axial,norm_dz_axial,norm_zweighted,"
         "norm_grad,circulation,divergence_sup,dealias_tail,zeta_tail\n";
  char buf[64];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
    out << buf;
  };
  for (const TrajectorySample& s : traj.samples) {
    put(s.tau, ',');
    put(s.norm_total, ',');
    put(s.norm_planar, ',');
    put(s.norm_axial, ',');
    put(s.norm_dz_axial, ',');
    put(s.norm_zweighted, ',');
    put(s.norm_grad, ',');
    put(s.circulation, ',');
    put(s.divergence_sup, ',');
    put(s.dealias_tail, ',');
    put(s.zeta_tail, '\n');
  }
  if (!out) fail(file, "write failed");
}

}  // namespace oseenlab
