#include "helix/grid.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "helix/errors.hpp"

namespace helix {

Grid::Grid(double half_width, int nodes) : R(half_width), n(nodes) {
    if (!(R > 0.0)) throw ValidationError("grid half width must be positive");
    if (n < 9) throw ValidationError("grid needs at least 9 nodes per axis");
}

void Grid::locate_cell(Vec2 p, int& ci, int& cj) const {
    const double h = spacing();
    ci = static_cast<int>(std::floor((p.x + R) / h));
    cj = static_cast<int>(std::floor((p.y + R) / h));
    ci = std::clamp(ci, 0, n - 2);
    cj = std::clamp(cj, 0, n - 2);
}

Vec2 Grid::nearest_cell_center(Vec2 p) const {
    int ci, cj;
    locate_cell(p, ci, cj);
    return cell_center(ci, cj);
}

double ScalarField::interpolate(Vec2 p) const {
    if (!grid.contains(p)) throw DomainError("interpolate: point outside grid");
    int ci, cj;
    grid.locate_cell(p, ci, cj);
    const double h = grid.spacing();
    const double u = (p.x - grid.x(ci)) / h;
    const double v = (p.y - grid.x(cj)) / h;
    return (1 - u) * (1 - v) * at(ci, cj) + u * (1 - v) * at(ci + 1, cj) +
           (1 - u) * v * at(ci, cj + 1) + u * v * at(ci + 1, cj + 1);
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
}

void ScalarField::zero_boundary() {
    for (int i = 0; i < grid.n; ++i) {
        at(i, 0) = 0.0;
        at(i, grid.n - 1) = 0.0;
        at(0, i) = 0.0;
        at(grid.n - 1, i) = 0.0;
    }
}

void write_field_csv(const ScalarField& f, const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw ValidationError("cannot open " + path + " for writing");
    std::fprintf(fp, "i,j,x,y,value\n");
    for (int j = 0; j < f.grid.n; ++j)
        for (int i = 0; i < f.grid.n; ++i)
            std::fprintf(fp, "%d,%d,%.17g,%.17g,%.17g\n", i, j, f.grid.x(i), f.grid.x(j),
                         f.at(i, j));
    std::fclose(fp);
}

void write_field_binary(const ScalarField& f, const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw ValidationError("cannot open " + path + " for writing");
    const uint32_t n = static_cast<uint32_t>(f.grid.n);
    const double R = f.grid.R;
    std::fwrite(&n, sizeof n, 1, fp);
    std::fwrite(&R, sizeof R, 1, fp);
    std::fwrite(f.values.data(), sizeof(double), f.values.size(), fp);
    std::fclose(fp);
}

ScalarField read_field_binary(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw ValidationError("cannot open " + path);
    uint32_t n = 0;
    double R = 0.0;
    if (std::fread(&n, sizeof n, 1, fp) != 1 || std::fread(&R, sizeof R, 1, fp) != 1) {
        std::fclose(fp);
        throw ValidationError("truncated binary grid file " + path);
    }
    ScalarField f(Grid(R, static_cast<int>(n)));
    const size_t want = static_cast<size_t>(n) * n;
    if (std::fread(f.values.data(), sizeof(double), want, fp) != want) {
        std::fclose(fp);
        throw ValidationError("truncated binary grid file " + path);
    }
    std::fclose(fp);
    return f;
}

}  // namespace helix
