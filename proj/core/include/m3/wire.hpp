#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "m3/access_control.hpp"
#include "m3/errors.hpp"

namespace m3::wire {

/// The one protocol version this server speaks. Clients asking for a
/// different version still get a success response carrying this string;
/// compatibility is the client's call.
inline constexpr std::string_view kProtocolVersion = "2024-11-05";

inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;

struct ToolDescriptor {
    std::string name; // unique, snake_case
    std::string description;
    /// JSON-schema-style object: {"type":"object","properties":{...},
    /// "required":[...]}. Declares every parameter the handler reads.
    nlohmann::json input_schema;
};

struct ToolResult {
    std::vector<std::string> text_blocks;
    bool is_error = false;

    static ToolResult ok(std::vector<std::string> blocks) {
        return {std::move(blocks), false};
    }
    static ToolResult error(std::string message) {
        return {{std::move(message)}, true};
    }
};

/// Thrown by gatekeepers and handlers for failures that belong in-band:
/// the wire response is a successful result with isError=true, never a
/// JSON-RPC error object.
class ToolError : public Error {
public:
    using Error::Error;
};

/// Thrown by call_tool for an unknown tool or arguments that violate
/// the declared input schema; the dispatcher maps it to -32602.
class InvalidParamsError : public Error {
public:
    using Error::Error;
};

struct CallContext {
    std::optional<access_control::AccessClaims> identity;
};

using ToolHandler = std::function<ToolResult(const nlohmann::json& args, const CallContext&)>;

/// Runs before dispatch on every tools/call. Receives the arguments
/// mutably (it consumes the _token transport field) and returns the
/// verified identity, or throws ToolError to reject in-band.
using Gatekeeper =
    std::function<std::optional<access_control::AccessClaims>(const std::string& tool,
                                                              nlohmann::json& args)>;

/// MCP server over newline-delimited JSON-RPC 2.0 on stdio. Messages
/// are read, dispatched, and answered strictly sequentially; no handler
/// runs concurrently with another.
class Server {
public:
    enum class Phase { created, initialized };

    Server(std::string name, std::string version);

    /// Throws ConfigError on a duplicate name or registration after
    /// initialize. Registration order defines tools/list order.
    void register_tool(ToolDescriptor descriptor, ToolHandler handler);

    void set_gatekeeper(Gatekeeper gatekeeper);

    /// Processes one input line. Returns the response line to emit, or
    /// nullopt for notifications (which never produce bytes).
    std::optional<std::string> handle_message(std::string_view line);

    /// Reads lines from `in` until EOF, writing one response line per
    /// request to `out`. Returns the process exit code.
    int run(std::istream& in, std::ostream& out);

    /// Validates arguments against the declared schema and invokes the
    /// handler. Handler faults come back as in-band errors; an unknown
    /// tool or a schema violation throws InvalidParamsError.
    ToolResult call_tool(const std::string& name, nlohmann::json arguments,
                         std::optional<access_control::AccessClaims> identity);

    Phase phase() const { return phase_; }
    const std::vector<ToolDescriptor>& tools() const { return descriptors_; }
    /// Number of tool handler executions; the phase gate keeps this at
    /// zero until initialize succeeds.
    std::uint64_t handler_invocations() const { return handler_invocations_; }

private:
    nlohmann::json dispatch_request(const nlohmann::json& message);
    nlohmann::json handle_initialize();
    nlohmann::json handle_tools_list();
    nlohmann::json handle_tools_call(const nlohmann::json& params);

    std::string name_;
    std::string version_;
    Phase phase_ = Phase::created;
    std::vector<ToolDescriptor> descriptors_;
    std::vector<ToolHandler> handlers_;
    Gatekeeper gatekeeper_;
    std::optional<access_control::AccessClaims> session_identity_;
    std::uint64_t handler_invocations_ = 0;
};

} // namespace m3::wire
