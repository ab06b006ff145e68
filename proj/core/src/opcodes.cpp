#include "obfscore/opcodes.hpp"

#include <array>

namespace obfscore {

namespace {

std::array<const char*, 256> make_table() {
    std::array<const char*, 256> t{};
    t.fill(nullptr);
    t[0x00] = "STOP";
    t[0x01] = "ADD";
    t[0x02] = "MUL";
    t[0x03] = "SUB";
    t[0x04] = "DIV";
    t[0x05] = "SDIV";
    t[0x06] = "MOD";
    t[0x07] = "SMOD";
    t[0x08] = "ADDMOD";
    t[0x09] = "MULMOD";
    t[0x0a] = "EXP";
    t[0x0b] = "SIGNEXTEND";
    t[0x10] = "LT";
    t[0x11] = "GT";
    t[0x12] = "SLT";
    t[0x13] = "SGT";
    t[0x14] = "EQ";
    t[0x15] = "ISZERO";
    t[0x16] = "AND";
    t[0x17] = "OR";
    t[0x18] = "XOR";
    t[0x19] = "NOT";
    t[0x1a] = "BYTE";
    t[0x1b] = "SHL";
    t[0x1c] = "SHR";
    t[0x1d] = "SAR";
    t[0x20] = "KECCAK256";
    t[0x30] = "ADDRESS";
    t[0x31] = "BALANCE";
    t[0x32] = "ORIGIN";
    t[0x33] = "CALLER";
    t[0x34] = "CALLVALUE";
    t[0x35] = "CALLDATALOAD";
    t[0x36] = "CALLDATASIZE";
    t[0x37] = "CALLDATACOPY";
    t[0x38] = "CODESIZE";
    t[0x39] = "CODECOPY";
    t[0x3a] = "GASPRICE";
    t[0x3b] = "EXTCODESIZE";
    t[0x3c] = "EXTCODECOPY";
    t[0x3d] = "RETURNDATASIZE";
    t[0x3e] = "RETURNDATACOPY";
    t[0x3f] = "EXTCODEHASH";
    t[0x40] = "BLOCKHASH";
    t[0x41] = "COINBASE";
    t[0x42] = "TIMESTAMP";
    t[0x43] = "NUMBER";
    t[0x44] = "PREVRANDAO";
    t[0x45] = "GASLIMIT";
    t[0x46] = "CHAINID";
    t[0x47] = "SELFBALANCE";
    t[0x48] = "BASEFEE";
    t[0x50] = "POP";
    t[0x51] = "MLOAD";
    t[0x52] = "MSTORE";
    t[0x53] = "MSTORE8";
    t[0x54] = "SLOAD";
    t[0x55] = "SSTORE";
    t[0x56] = "JUMP";
    t[0x57] = "JUMPI";
    t[0x58] = "PC";
    t[0x59] = "MSIZE";
    t[0x5a] = "GAS";
    t[0x5b] = "JUMPDEST";
    t[0x5f] = "PUSH0";
    t[0xf0] = "CREATE";
    t[0xf1] = "CALL";
    t[0xf2] = "CALLCODE";
    t[0xf3] = "RETURN";
    t[0xf4] = "DELEGATECALL";
    t[0xf5] = "CREATE2";
    t[0xfa] = "STATICCALL";
    t[0xfd] = "REVERT";
    t[0xfe] = "INVALID";
    t[0xff] = "SELFDESTRUCT";
    return t;
}

const std::array<const char*, 256> kTable = make_table();

}  // namespace

std::string mnemonic(uint8_t opcode) {
    if (opcode >= op::PUSH1 && opcode <= op::PUSH32)
        return "PUSH" + std::to_string(opcode - op::PUSH1 + 1);
    if (opcode >= 0x80 && opcode <= 0x8f) return "DUP" + std::to_string(opcode - 0x80 + 1);
    if (opcode >= 0x90 && opcode <= 0x9f) return "SWAP" + std::to_string(opcode - 0x90 + 1);
    if (opcode >= 0xa0 && opcode <= 0xa4) return "LOG" + std::to_string(opcode - 0xa0);
    if (kTable[opcode]) return kTable[opcode];
    static const char d[] = "0123456789abcdef";
    std::string s = "UNKNOWN_";
    s += d[opcode >> 4];
    s += d[opcode & 0x0f];
    return s;
}

}  // namespace obfscore
