#ifndef INFOMECH_JSON_IO_HPP
#define INFOMECH_JSON_IO_HPP

#include <string>

#include "infomech/context.hpp"
#include "infomech/geometry.hpp"
#include "infomech/mechanisms.hpp"
#include "infomech/protocol.hpp"

namespace infomech {

// Context schema:
//   {"theta": [..], "omega": [..], "actions": [..],
//    "mu": [[row per omega]], "u": [[[u[theta][omega][action]]]]}
// mu rows are indexed by omega, columns by theta. Rejects contexts whose
// validation report is non-empty.
Context parse_context_json(const std::string& text);
std::string context_to_json(const Context& ctx);

// Protocol schema: nested node objects
//   {"kind":"seller","psi":{"<omega label>":[..per child..],..},"children":[..]}
//   {"kind":"transfer","amount":0.533,"child":{..}}
//   {"kind":"buyer","children":{"<label>":{..},..}}
//   {"kind":"leaf"}
// Buyer children keep file order; seller psi rows are looked up by the
// context's omega labels.
ProtocolTree parse_protocol_json(const std::string& text, const Context& ctx);
std::string protocol_to_json(const Context& ctx, const ProtocolTree& tree);

std::string posterior_set_to_json(const Context& ctx, const PosteriorSet& q);
std::string menu_to_json(const Context& ctx, const Menu& menu);

}  // namespace infomech

#endif  // INFOMECH_JSON_IO_HPP
