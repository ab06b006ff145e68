#pragma once

#include <cstdint>
#include <string>

namespace obfscore {

// EVM opcodes referenced by name in the toolkit. Everything else is handled
// numerically through the mnemonic table.
namespace op {
inline constexpr uint8_t STOP = 0x00;
inline constexpr uint8_t KECCAK256 = 0x20;
inline constexpr uint8_t CALLDATASIZE = 0x36;
inline constexpr uint8_t CALLDATACOPY = 0x37;
inline constexpr uint8_t RETURNDATASIZE = 0x3d;
inline constexpr uint8_t RETURNDATACOPY = 0x3e;
inline constexpr uint8_t GAS = 0x5a;
inline constexpr uint8_t JUMPDEST = 0x5b;
inline constexpr uint8_t PUSH0 = 0x5f;
inline constexpr uint8_t PUSH1 = 0x60;
inline constexpr uint8_t PUSH4 = 0x63;
inline constexpr uint8_t PUSH20 = 0x73;
inline constexpr uint8_t PUSH32 = 0x7f;
inline constexpr uint8_t CREATE = 0xf0;
inline constexpr uint8_t CALL = 0xf1;
inline constexpr uint8_t CALLCODE = 0xf2;
inline constexpr uint8_t RETURN = 0xf3;
inline constexpr uint8_t DELEGATECALL = 0xf4;
inline constexpr uint8_t CREATE2 = 0xf5;
inline constexpr uint8_t STATICCALL = 0xfa;
inline constexpr uint8_t REVERT = 0xfd;
inline constexpr uint8_t INVALID = 0xfe;
inline constexpr uint8_t SELFDESTRUCT = 0xff;
}  // namespace op

/// True for PUSH1..PUSH32 (0x60..0x7f). PUSH0 carries no immediate.
inline constexpr bool is_push_with_immediate(uint8_t opcode) {
    return opcode >= op::PUSH1 && opcode <= op::PUSH32;
}

/// Immediate size in bytes: k for PUSHk, 0 otherwise.
inline constexpr int immediate_size(uint8_t opcode) {
    return is_push_with_immediate(opcode) ? opcode - op::PUSH1 + 1 : 0;
}

/// Mnemonic for an opcode; unassigned values render as UNKNOWN_xx.
std::string mnemonic(uint8_t opcode);

}  // namespace obfscore
