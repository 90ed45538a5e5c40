"""Master/worker execution of the MCPAM heavy steps over framed JSON on TCP."""
