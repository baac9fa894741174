#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dual Dyson MCP Server
=====================

Model Context Protocol server exposing the dual Dyson experiments as tools
over stdio.

Usage:
    dualdyson-mcp

In an MCP client config:
    {
      "mcpServers": {
        "dualdyson": {
          "command": "dualdyson-mcp"
        }
      }
    }
"""

import json
import sys
from typing import Any, Dict

# MCP imports
try:
    from mcp.server import Server
    from mcp.server.stdio import stdio_server
    from mcp.types import TextContent, Tool
except ImportError:
    print("ERROR: MCP not installed. Install with: pip install mcp", file=sys.stderr)
    sys.exit(1)

import structlog

from dds_api import DualDysonAPI, HhgSpectrumResult, SweepResult
from dds_cli import configure_logging
from dds_config import parse_config

logger = structlog.get_logger(__name__)

api = DualDysonAPI()

server = Server("dualdyson-server")


# =============================================================================
# MCP TOOL DEFINITIONS
# =============================================================================

_INIT_SCHEMA = {
    "type": "object",
    "description": "Initial amplitudes; each a number or [re, im]",
    "properties": {"c1": {}, "c2": {}},
}

_HHG_SCHEMA = {
    "type": "object",
    "properties": {
        "omega0": {"type": "number", "description": "Bare level splitting ω0"},
        "omegaL": {"type": "number", "description": "Laser frequency ω_L"},
        "field": {"type": "number", "description": "Field amplitude Ω"},
        "dipole": {"type": "number", "description": "Dipole matrix element d12 (default 1)"},
    },
    "required": ["omega0", "omegaL"],
}

_SPECTRUM_SCHEMA = {
    "type": "object",
    "properties": {
        "rel_threshold": {"type": "number", "description": "Peak threshold relative to the maximum"},
        "remove_carrier": {"type": "boolean", "description": "Subtract the analytic ω0R carrier"},
    },
}

TOOLS = [
    Tool(
        name="dds_jc_compare",
        description="Compare Dyson or dual series orders with the exact Jaynes-Cummings amplitudes",
        inputSchema={
            "type": "object",
            "properties": {
                "jc": {
                    "type": "object",
                    "properties": {
                        "omega": {"type": "number", "description": "Field mode frequency ω"},
                        "omega0": {"type": "number", "description": "Atomic frequency ω0"},
                        "g": {"type": "number", "description": "Coupling g"},
                        "n": {"type": "integer", "description": "Photon number n (default 0)"},
                    },
                    "required": ["omega", "omega0", "g"],
                },
                "init": _INIT_SCHEMA,
                "grid": {
                    "type": "object",
                    "properties": {"t_max": {"type": "number"}, "samples": {"type": "integer"}},
                },
                "series": {"type": "string", "enum": ["auto", "dyson", "dual"]},
                "engine_check": {"type": "boolean", "description": "Also run the numerical series engine"},
            },
            "required": ["jc"],
        },
    ),
    Tool(
        name="dds_hhg_spectrum",
        description="Dipole spectrum of a two-level atom in a strong laser field, with classified peaks",
        inputSchema={
            "type": "object",
            "properties": {
                "hhg": _HHG_SCHEMA,
                "init": _INIT_SCHEMA,
                "grid": {
                    "type": "object",
                    "properties": {"samples_per_period": {"type": "integer"}, "periods": {"type": "integer"}},
                },
                "spectrum": _SPECTRUM_SCHEMA,
                "picture": {"type": "string", "enum": ["schrodinger", "interaction"]},
            },
            "required": ["hhg"],
        },
    ),
    Tool(
        name="dds_wkbj_demo",
        description="WKBJ solution of psi'' + alpha(x)^2 psi = 0 against an adaptive reference",
        inputSchema={
            "type": "object",
            "properties": {
                "wkbj": {
                    "type": "object",
                    "properties": {
                        "profile": {"type": "string", "enum": ["constant", "linear", "sqrt-linear"]},
                        "k": {"type": "number"},
                        "a": {"type": "number"},
                        "b": {"type": "number"},
                        "epsilon": {"type": "number"},
                        "x0": {"type": "number"},
                        "x1": {"type": "number"},
                        "psi0": {"type": "number"},
                        "phi0": {"type": "number"},
                    },
                    "required": ["profile", "x1"],
                },
                "grid": {"type": "object", "properties": {"samples": {"type": "integer"}}},
                "tol": {"type": "number", "description": "Reference solver tolerance (>= 1e-12)"},
            },
            "required": ["wkbj"],
        },
    ),
    Tool(
        name="dds_sweep",
        description="Hyper-Raman line centres against ω0J0(z) ± 2nω_L while sweeping one parameter",
        inputSchema={
            "type": "object",
            "properties": {
                "hhg": _HHG_SCHEMA,
                "sweep": {
                    "type": "object",
                    "properties": {
                        "parameter": {"type": "string", "enum": ["z", "field", "omega0", "omegaL", "dipole"]},
                        "values": {"type": "array", "items": {"type": "number"}},
                        "orders": {"type": "array", "items": {"type": "integer"}},
                    },
                    "required": ["parameter", "values"],
                },
                "init": _INIT_SCHEMA,
                "grid": {
                    "type": "object",
                    "properties": {"samples_per_period": {"type": "integer"}, "periods": {"type": "integer"}},
                },
                "spectrum": _SPECTRUM_SCHEMA,
            },
            "required": ["hhg", "sweep"],
        },
    ),
    Tool(
        name="dds_renormalized_gap",
        description="Renormalized level splitting ω0R = ω0 J0(2Ωd12/ω_L) and the first hyper-Raman lines",
        inputSchema={
            "type": "object",
            "properties": {
                "omega0": {"type": "number"},
                "omegaL": {"type": "number"},
                "field": {"type": "number"},
                "dipole": {"type": "number", "default": 1.0},
            },
            "required": ["omega0", "omegaL", "field"],
        },
    ),
    Tool(
        name="dds_bessel_identity",
        description="Worst residual of the Bessel expansion of exp(i σ1 z sin φ) over a φ grid",
        inputSchema={
            "type": "object",
            "properties": {
                "z": {"type": "number"},
                "points": {"type": "integer", "default": 100},
                "cutoff": {"type": "integer", "description": "Highest Bessel order (default z + 20)"},
            },
            "required": ["z"],
        },
    ),
]

_EXPERIMENT_TOOLS = {
    "dds_jc_compare": "jc-compare",
    "dds_hhg_spectrum": "hhg-spectrum",
    "dds_wkbj_demo": "wkbj-demo",
    "dds_sweep": "sweep",
}


# =============================================================================
# MCP TOOL HANDLERS
# =============================================================================

def handle_tool(name: str, arguments: Dict[str, Any]) -> Dict[str, Any]:
    """Route one tool call to the API and return a JSON-ready result."""
    arguments = dict(arguments or {})
    if name in _EXPERIMENT_TOOLS:
        config = parse_config(json.dumps({"experiment": _EXPERIMENT_TOOLS[name], **arguments}))
        result = api.run(config)
        report = api.report(result, config)
        if isinstance(result, HhgSpectrumResult):
            report["peaks"] = [{"freq": p.frequency, "height": p.height, "kind": p.label, "order": p.order}
                               for p in result.peaks]
        elif isinstance(result, SweepResult):
            table = result.tables()["sweep.csv"]
            report["lines"] = [dict(zip(table.header, row)) for row in table.rows]
        return report

    if name == "dds_renormalized_gap":
        return api.renormalized_gap(
            omega0=arguments["omega0"],
            omegaL=arguments["omegaL"],
            field=arguments["field"],
            dipole=arguments.get("dipole", 1.0),
        )

    elif name == "dds_bessel_identity":
        return api.bessel_identity(
            z=arguments["z"],
            points=arguments.get("points", 100),
            cutoff=arguments.get("cutoff"),
        )

    return {"error": f"Unknown tool: {name}"}


@server.list_tools()
async def list_tools() -> list[Tool]:
    """List available dual Dyson tools"""
    return TOOLS


@server.call_tool()
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    """Handle tool calls"""
    try:
        result = handle_tool(name, arguments)
        return [TextContent(
            type="text",
            text=json.dumps(result, indent=2, default=str)
        )]

    except Exception as e:
        logger.error("tool_failed", tool=name, error=str(e))
        return [TextContent(
            type="text",
            text=json.dumps({
                "error": str(e),
                "tool": name,
                "arguments": arguments
            }, indent=2, default=str)
        )]


# =============================================================================
# MAIN
# =============================================================================

async def main():
    """Run the MCP server"""
    async with stdio_server() as (read_stream, write_stream):
        await server.run(
            read_stream,
            write_stream,
            server.create_initialization_options()
        )


def cli_entry():
    """Entry point for uvx/pip install"""
    import asyncio
    # stdout carries the protocol
    configure_logging(verbose=False)
    asyncio.run(main())


if __name__ == "__main__":
    cli_entry()
