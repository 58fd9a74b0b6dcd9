// SPDX-License-Identifier: Apache-2.0
#include "lens/density_volume.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lens/num_io.hpp"
#include "lens/parallel.hpp"

namespace lens {

void VolumeConfig::validate() const {
  if (resolution < 1) throw DomainError("volume resolution must be >= 1");
  if (!std::isfinite(t_sigma) || t_sigma < 0.0)
    throw DomainError("t_sigma must be finite and >= 0");
  if (!std::isfinite(e_max) || e_max < 0.0)
    throw DomainError("e_max must be finite and >= 0");
}

// floor() with a small forgiveness term: edge / lambda is an integer in
// exact arithmetic whenever edge is a multiple of lambda (always true for
// the smallest edge, which defines lambda), and round-off must not lose a
// whole cell layer there.
int grid_cells_along(double edge, double lambda) {
  if (edge <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::floor(edge / lambda + 1e-9)));
}

std::vector<Vec3> build_grid(const Aabb& box, int resolution_param) {
  box.validate();
  if (resolution_param < 1) throw DomainError("build_grid: resolution must be >= 1");
  const double lambda = box.smallest_positive_edge() / resolution_param;
  const Vec3 d = box.diagonal();
  const int nx = grid_cells_along(d.x, lambda);
  const int ny = grid_cells_along(d.y, lambda);
  const int nz = grid_cells_along(d.z, lambda);

  std::vector<Vec3> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int iz = 0; iz < nz; ++iz) {
    const double z = d.z > 0.0 ? box.min.z + (iz + 0.5) * lambda
                               : 0.5 * (box.min.z + box.max.z);
    for (int iy = 0; iy < ny; ++iy) {
      const double y = d.y > 0.0 ? box.min.y + (iy + 0.5) * lambda
                                 : 0.5 * (box.min.y + box.max.y);
      for (int ix = 0; ix < nx; ++ix) {
        const double x = d.x > 0.0 ? box.min.x + (ix + 0.5) * lambda
                                   : 0.5 * (box.min.x + box.max.x);
        centers.push_back(Vec3{x, y, z});
      }
    }
  }
  return centers;
}

OccupiedPointSet extract_density_volume_box(const SceneField& field,
                                            const Aabb& extended_box,
                                            const VolumeConfig& config, int jobs) {
  config.validate();
  const std::vector<Vec3> centers = build_grid(extended_box, config.resolution);
  const double lambda =
      extended_box.smallest_positive_edge() / config.resolution;

  // Parallel occupancy test into per-index slots, then an ordered sweep, so
  // the point order never depends on the thread schedule.
  std::vector<unsigned char> occupied(centers.size(), 0);
  const std::size_t chunk = 8192;
  const std::size_t chunks = (centers.size() + chunk - 1) / chunk;
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(lo + chunk, centers.size());
    for (std::size_t k = lo; k < hi; ++k) {
      const double sigma = field.density_only(centers[k]);
      if (!std::isfinite(sigma) || sigma < 0.0)
        throw DomainError("field returned invalid density " +
                          format_double(sigma));
      occupied[k] = sigma > config.t_sigma ? 1 : 0;
    }
  });

  OccupiedPointSet set;
  set.spacing = lambda;
  set.source_box = extended_box;
  set.t_sigma = config.t_sigma;
  for (std::size_t k = 0; k < centers.size(); ++k)
    if (occupied[k]) set.points.push_back(centers[k]);
  return set;
}

OccupiedPointSet extract_density_volume(const SceneField& field,
                                        std::span<const Pose> training_poses,
                                        const VolumeConfig& config, int jobs) {
  config.validate();
  const Aabb box = extend_box(bounding_box(training_poses), config.e_max);
  return extract_density_volume_box(field, box, config, jobs);
}

void save_occupied_points(const OccupiedPointSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << "# lambda=" << format_double(set.spacing) << " box="
      << format_double(set.source_box.min.x) << ' '
      << format_double(set.source_box.min.y) << ' '
      << format_double(set.source_box.min.z) << ' '
      << format_double(set.source_box.max.x) << ' '
      << format_double(set.source_box.max.y) << ' '
      << format_double(set.source_box.max.z)
      << " t_sigma=" << format_double(set.t_sigma) << '\n';
  for (const Vec3& p : set.points)
    out << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(p.z) << '\n';
  if (!out.flush()) throw DomainError("failed writing " + path);
}

OccupiedPointSet load_occupied_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");

  std::istringstream header(line);
  std::string hash, lambda_kv, t_kv, box_kv;
  std::string box_tok[6];
  header >> hash >> lambda_kv >> box_kv;
  if (hash != "#" || lambda_kv.rfind("lambda=", 0) != 0 ||
      box_kv.rfind("box=", 0) != 0)
    throw ParseError(path, 1, "expected \"# lambda=... box=... t_sigma=...\"");
  box_tok[0] = box_kv.substr(4);
  for (int i = 1; i < 6; ++i)
    if (!(header >> box_tok[i])) throw ParseError(path, 1, "truncated box");
  if (!(header >> t_kv) || t_kv.rfind("t_sigma=", 0) != 0)
    throw ParseError(path, 1, "missing t_sigma");

  OccupiedPointSet set;
  set.spacing = parse_double(lambda_kv.substr(7));
  set.source_box = Aabb{{parse_double(box_tok[0]), parse_double(box_tok[1]),
                         parse_double(box_tok[2])},
                        {parse_double(box_tok[3]), parse_double(box_tok[4]),
                         parse_double(box_tok[5])}};
  set.t_sigma = parse_double(t_kv.substr(8));
  if (!(set.spacing > 0.0)) throw ParseError(path, 1, "lambda must be positive");
  set.source_box.validate();

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string sx, sy, sz, extra;
    if (!(row >> sx >> sy >> sz) || (row >> extra))
      throw ParseError(path, line_no, "expected \"x y z\"");
    set.points.push_back(
        Vec3{parse_double(sx), parse_double(sy), parse_double(sz)});
  }
  return set;
}

}  // namespace lens
