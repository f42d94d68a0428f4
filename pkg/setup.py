from setuptools import setup, find_packages

setup(
        name='mems-field',
        version='0.1',
        description='Numerical lab for the radial MEMS equation with fringing field',
        packages=find_packages(exclude=['examples', 'examples.*']),
        python_requires='>=3.7',
        install_requires=[
            'numpy',
            'pandas',
            'scipy'],
        entry_points={
            'console_scripts': [
                'mems-field=memsfield.memsfield:main',
            ],
        },
    )
