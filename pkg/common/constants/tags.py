HOME = "Home"
POLICY = "Policy"
SIMULATION = "Simulation"
SPEEDUP = "Speedup"
ORACLE = "Oracle"
