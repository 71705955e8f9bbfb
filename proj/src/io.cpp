#include "vecthost/io.hpp"

#include <charconv>
#include <fstream>

namespace vecthost {

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string series_csv(const DiagnosticsSeries& s) {
    std::string out = DiagnosticsSeries::header();
    out += '\n';
    for (const DiagRow& r : s.rows) {
        out += format_number(r.t);
        out += ',';
        out += format_number(r.U);
        out += ',';
        out += format_number(r.V);
        out += ',';
        out += format_number(r.V_tau_total);
        out += ',';
        out += format_number(r.v_L1);
        out += ',';
        out += format_number(r.v_Linf);
        out += ',';
        out += format_number(r.psi_L1);
        out += ',';
        out += format_number(r.psi_L2);
        out += ',';
        out += format_number(r.psi_Linf);
        out += ',';
        out += format_number(r.phi_minus_rhostar_Linf);
        out += ',';
        out += format_number(r.u_minus_ubar_L2);
        out += ',';
        out += format_number(r.ubar);
        out += ',';
        out += format_number(r.mass_residual);
        out += ',';
        out += std::to_string(r.clamp_flag);
        out += '\n';
    }
    return out;
}

std::string final_state_csv(const SimState& s) {
    const Grid& g = s.u.grid();
    std::string out = "ix,iy,phi,psi,u,v,v_tau\n";
    for (int cell = 0; cell < g.cell_count(); ++cell) {
        out += std::to_string(g.ix_of(cell));
        out += ',';
        out += std::to_string(g.iy_of(cell));
        out += ',';
        const int sc = g.star_index_of(cell);
        if (sc >= 0) {
            out += format_number(s.phi[sc]);
            out += ',';
            out += format_number(s.psi[sc]);
        } else {
            out += ',';
        }
        out += ',';
        out += format_number(s.u[cell]);
        out += ',';
        out += format_number(s.v[cell]);
        out += ',';
        out += format_number(s.v_tau[cell]);
        out += '\n';
    }
    return out;
}

std::string rho_star_csv(const ScalarField& rho_star) {
    if (rho_star.mask() != Mask::Star)
        throw SimError("rho_star_csv: the steady state lives on the vector habitat");
    const Grid& g = rho_star.grid();
    std::string out = "ix,iy,rho_star\n";
    const auto& cells = g.star_cells();
    for (int c = 0; c < rho_star.size(); ++c) {
        const int cell = cells[static_cast<size_t>(c)];
        out += std::to_string(g.ix_of(cell));
        out += ',';
        out += std::to_string(g.iy_of(cell));
        out += ',';
        out += format_number(rho_star[c]);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SimError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw SimError("write failed: " + path);
}

} // namespace vecthost
